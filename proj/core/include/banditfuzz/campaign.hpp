#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banditfuzz/bandit.hpp"
#include "banditfuzz/machine.hpp"
#include "banditfuzz/target.hpp"
#include "banditfuzz/testgen.hpp"

namespace banditfuzz {

enum class SchedulerKind { EpsilonGreedy, Ucb, Exp3, Fifo };

std::string_view scheduler_name(SchedulerKind kind);
std::optional<SchedulerKind> parse_scheduler(std::string_view name);

struct CampaignConfig {
  SchedulerKind scheduler = SchedulerKind::EpsilonGreedy;
  int num_arms = 10;
  double alpha = 0.25;
  int gamma = 3;
  double eta = 0.1;
  double epsilon = 0.1;
  std::int64_t budget = 50000;
  std::uint64_t rng_seed = 1;
  BugConfig bugs = BugConfig::all();
  int test_length = kDefaultTestLength;
  int max_test_length = kDefaultMaxTestLength;
  int mutants_per_interesting = 5;
  std::array<double, kNumMutationOps> operator_weights = {0.25, 0.25, 0.25, 0.25};
  int step_cap = kDefaultStepCap;
  bool disjoint_reward = false;
  // A test is "interesting" (worth mutating) when it yields new local
  // coverage for its arm; switching this off uses new global coverage, which
  // is always the rule for the FIFO baseline.
  bool interesting_local = true;
  // Saturation-triggered arm replacement (the gamma monitor).
  bool saturation_resets = true;
  // Replace an arm's seed when its pool runs dry. Disabling this makes the
  // campaign stop early once every pool is empty.
  bool reseed_on_empty = true;

  bool operator==(const CampaignConfig&) const = default;
};

// Throws std::invalid_argument naming the offending field.
void validate(const CampaignConfig& config);

// Why an arm was reset in an iteration (bit flags; both can occur in one
// iteration only when gamma == 1).
inline constexpr std::uint8_t kResetEmpty = 1;
inline constexpr std::uint8_t kResetSaturated = 2;
std::string reset_label(std::uint8_t flags);

struct IterationRecord {
  std::int64_t t = 0;  // 1-based test index
  int arm_id = 0;
  double reward = 0.0;
  int new_local = 0;
  int new_global = 0;
  int cum_cov = 0;
  std::uint8_t reset = 0;
  int bugs_detected = 0;  // distinct bugs detected so far

  bool operator==(const IterationRecord&) const = default;
};

struct BugDetection {
  BugId bug{};
  std::int64_t test_index = 0;  // 1-based
  Test test;
  std::vector<Mismatch> mismatches;
};

struct CampaignReport {
  CampaignConfig config;
  int universe_size = 0;
  std::vector<IterationRecord> iterations;
  std::vector<BugDetection> detections;
  std::int64_t total_tests = 0;
  std::int64_t total_resets = 0;
  int final_coverage = 0;

  std::optional<std::int64_t> detection_index(BugId bug) const;
};

// Runs the bandit-scheduled loop: select an arm, pop its FIFO pool (resetting
// the arm when the pool is dry), execute on the target, score new coverage,
// update the scheduler, mutate interesting tests back into the arm's pool,
// and replace the arm when the saturation monitor fires.
CampaignReport run_campaign(const CampaignConfig& config, Target& target);

// Static-scheduling anchor: one global FIFO pool consumed in arrival order,
// with the same generation, mutation, execution and accounting machinery.
CampaignReport run_baseline(const CampaignConfig& config, Target& target);

// Dispatches on config.scheduler.
CampaignReport run(const CampaignConfig& config, Target& target);

struct SpeedupReport {
  struct PerBug {
    BugId bug{};
    std::optional<std::int64_t> base_tests;
    std::optional<std::int64_t> treatment_tests;
    // Present only when both runs detected the bug.
    std::optional<double> speedup;
  };
  std::vector<PerBug> bugs;
  // Tests the baseline needs to reach the treatment's final coverage divided
  // by the tests the treatment needs; absent when the baseline never gets
  // there.
  std::optional<double> coverage_speedup;
  bool base_reached_treatment_coverage = false;
  // Percentage-point difference of final coverage at budget.
  double coverage_increment_pp = 0.0;
};

// Requires both reports to come from the same budget and bug configuration.
SpeedupReport speedup(const CampaignReport& base, const CampaignReport& treatment);

}  // namespace banditfuzz
