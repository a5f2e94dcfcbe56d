#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "banditfuzz/campaign.hpp"

namespace banditfuzz {

// A grid of campaigns: one per (algorithm, trial), all sharing the same
// knobs. Trial k runs with seed base.rng_seed + k.
struct ExperimentSpec {
  std::vector<SchedulerKind> algorithms = {SchedulerKind::EpsilonGreedy, SchedulerKind::Ucb,
                                           SchedulerKind::Exp3, SchedulerKind::Fifo};
  CampaignConfig base;
  int trials = 3;
  std::filesystem::path out_dir = "out";
  int jobs = 0;  // 0 = available parallelism

  bool operator==(const ExperimentSpec&) const = default;
};

void validate(const ExperimentSpec& spec);

// Merges values from a JSON config file into the spec. Keys mirror the CLI
// flags; unknown keys are rejected with a diagnostic naming the key.
void apply_config_file(ExperimentSpec& spec, const std::filesystem::path& path);

struct BugStats {
  std::vector<std::optional<std::int64_t>> per_trial;  // first-detection test index
  std::optional<double> median;                        // absent: not detected at the median
  std::optional<double> speedup_vs_fifo;
};

struct AlgoSummary {
  SchedulerKind algo{};
  std::vector<int> final_coverage_per_trial;
  double median_final_coverage = 0.0;
  double median_coverage_percent = 0.0;
  std::vector<std::int64_t> resets_per_trial;
  double median_resets = 0.0;
  std::map<BugId, BugStats> bugs;
  std::vector<std::optional<double>> coverage_speedup_per_trial;  // paired with fifo by trial
  std::optional<double> coverage_speedup_vs_fifo;                 // median of the above
  std::optional<double> coverage_increment_pp;  // vs fifo median final coverage
};

struct ExperimentSummary {
  ExperimentSpec spec;
  int universe_size = 0;
  std::vector<AlgoSummary> algos;

  const AlgoSummary* find(SchedulerKind kind) const;
};

// Median with missing values treated as +infinity; nullopt when the median
// itself is infinite.
std::optional<double> median_or_missing(const std::vector<std::optional<double>>& values);
double median_of(std::vector<double> values);

ExperimentSummary summarize(const ExperimentSpec& spec,
                            const std::vector<std::vector<CampaignReport>>& reports_per_algo);

std::string summary_to_json(const ExperimentSummary& summary);

// Per-bug text table: baseline median tests, then one speedup column per
// bandit algorithm (egreedy, ucb, exp3). Undetected entries render as "—".
std::string emit_table(const ExperimentSummary& summary);

void write_curve_csv(const std::filesystem::path& path, const CampaignReport& report);

// Runs the whole grid (trials dispatched to a worker pool), writes
// curve_<algo>_<trial>.csv files, summary.json, and bug reproducers under
// <out>/repro/, then returns the aggregated summary.
ExperimentSummary run_experiment(const ExperimentSpec& spec, std::ostream* log = nullptr);

// Locale-independent formatting used for all emitted numbers: shortest form
// with six significant digits.
std::string format_double(double v);

}  // namespace banditfuzz
