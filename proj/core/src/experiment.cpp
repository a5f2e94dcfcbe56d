#include "banditfuzz/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace banditfuzz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

void validate(const ExperimentSpec& spec) {
  if (spec.algorithms.empty()) throw std::invalid_argument("algo list must not be empty");
  if (spec.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (spec.jobs < 0) throw std::invalid_argument("jobs must be nonnegative");
  if (spec.out_dir.empty()) throw std::invalid_argument("out directory must not be empty");
  validate(spec.base);
}

void apply_config_file(ExperimentSpec& spec, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");

  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "algo") {
        const auto kind = parse_scheduler(value.get<std::string>());
        if (!kind) throw std::invalid_argument("algo must be one of egreedy|ucb|exp3|fifo");
        spec.algorithms = {*kind};
      } else if (key == "arms") {
        spec.base.num_arms = value.get<int>();
      } else if (key == "alpha") {
        spec.base.alpha = value.get<double>();
      } else if (key == "gamma") {
        spec.base.gamma = value.get<int>();
      } else if (key == "eta") {
        spec.base.eta = value.get<double>();
      } else if (key == "epsilon") {
        spec.base.epsilon = value.get<double>();
      } else if (key == "budget") {
        spec.base.budget = value.get<std::int64_t>();
      } else if (key == "trials") {
        spec.trials = value.get<int>();
      } else if (key == "seed") {
        spec.base.rng_seed = value.get<std::uint64_t>();
      } else if (key == "bugs") {
        spec.base.bugs = BugConfig::parse(value.get<std::string>());
      } else if (key == "out") {
        spec.out_dir = value.get<std::string>();
      } else if (key == "jobs") {
        spec.jobs = value.get<int>();
      } else if (key == "test_length") {
        spec.base.test_length = value.get<int>();
      } else if (key == "max_test_length") {
        spec.base.max_test_length = value.get<int>();
      } else if (key == "mutants_per_interesting") {
        spec.base.mutants_per_interesting = value.get<int>();
      } else if (key == "operator_weights") {
        const auto w = value.get<std::vector<double>>();
        if (w.size() != kNumMutationOps)
          throw std::invalid_argument("operator_weights needs exactly 4 entries");
        std::copy(w.begin(), w.end(), spec.base.operator_weights.begin());
      } else if (key == "step_cap") {
        spec.base.step_cap = value.get<int>();
      } else if (key == "disjoint_reward") {
        spec.base.disjoint_reward = value.get<bool>();
      } else if (key == "interesting_local") {
        spec.base.interesting_local = value.get<bool>();
      } else if (key == "saturation_resets") {
        spec.base.saturation_resets = value.get<bool>();
      } else if (key == "reseed_on_empty") {
        spec.base.reseed_on_empty = value.get<bool>();
      } else {
        throw std::invalid_argument("unknown config key: " + key);
      }
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument("config key " + key + " has the wrong type");
    }
  }
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::optional<double> median_or_missing(const std::vector<std::optional<double>>& values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto& x : values) v.push_back(x ? *x : kInf);
  const double m = median_of(std::move(v));
  if (std::isinf(m)) return std::nullopt;
  return m;
}

const AlgoSummary* ExperimentSummary::find(SchedulerKind kind) const {
  for (const AlgoSummary& a : algos)
    if (a.algo == kind) return &a;
  return nullptr;
}

ExperimentSummary summarize(const ExperimentSpec& spec,
                            const std::vector<std::vector<CampaignReport>>& reports_per_algo) {
  ExperimentSummary out;
  out.spec = spec;
  if (!reports_per_algo.empty() && !reports_per_algo.front().empty())
    out.universe_size = reports_per_algo.front().front().universe_size;

  const std::vector<CampaignReport>* fifo_reports = nullptr;
  for (std::size_t i = 0; i < spec.algorithms.size(); ++i)
    if (spec.algorithms[i] == SchedulerKind::Fifo) fifo_reports = &reports_per_algo[i];

  for (std::size_t i = 0; i < spec.algorithms.size(); ++i) {
    const std::vector<CampaignReport>& reports = reports_per_algo[i];
    AlgoSummary a;
    a.algo = spec.algorithms[i];

    std::vector<double> cov;
    std::vector<double> resets;
    for (const CampaignReport& r : reports) {
      a.final_coverage_per_trial.push_back(r.final_coverage);
      a.resets_per_trial.push_back(r.total_resets);
      cov.push_back(static_cast<double>(r.final_coverage));
      resets.push_back(static_cast<double>(r.total_resets));
    }
    a.median_final_coverage = median_of(cov);
    a.median_coverage_percent =
        out.universe_size > 0 ? 100.0 * a.median_final_coverage / out.universe_size : 0.0;
    a.median_resets = median_of(resets);

    for (BugId bug : spec.base.bugs.enabled_list()) {
      BugStats stats;
      std::vector<std::optional<double>> indices;
      for (const CampaignReport& r : reports) {
        const auto idx = r.detection_index(bug);
        stats.per_trial.push_back(idx);
        indices.push_back(idx ? std::optional<double>(static_cast<double>(*idx)) : std::nullopt);
      }
      stats.median = median_or_missing(indices);
      a.bugs.emplace(bug, std::move(stats));
    }

    if (fifo_reports && a.algo != SchedulerKind::Fifo) {
      for (int trial = 0; trial < spec.trials; ++trial) {
        const SpeedupReport s = speedup((*fifo_reports)[trial], reports[trial]);
        a.coverage_speedup_per_trial.push_back(s.coverage_speedup);
      }
      a.coverage_speedup_vs_fifo = median_or_missing(a.coverage_speedup_per_trial);
    }
    out.algos.push_back(std::move(a));
  }

  // Speedups and coverage increments against the FIFO medians.
  const AlgoSummary* fifo = out.find(SchedulerKind::Fifo);
  if (fifo) {
    for (AlgoSummary& a : out.algos) {
      if (a.algo == SchedulerKind::Fifo) continue;
      for (auto& [bug, stats] : a.bugs) {
        const auto& base_median = fifo->bugs.at(bug).median;
        if (base_median && stats.median && *stats.median > 0.0)
          stats.speedup_vs_fifo = *base_median / *stats.median;
      }
      a.coverage_increment_pp = out.universe_size > 0
                                    ? std::optional<double>(
                                          100.0 *
                                          (a.median_final_coverage - fifo->median_final_coverage) /
                                          out.universe_size)
                                    : std::nullopt;
    }
  }
  return out;
}

namespace {

nlohmann::json optional_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::string summary_to_json(const ExperimentSummary& summary) {
  nlohmann::json j;
  j["universe_size"] = summary.universe_size;
  j["trials"] = summary.spec.trials;
  j["budget"] = summary.spec.base.budget;
  j["seed"] = summary.spec.base.rng_seed;
  std::vector<std::string> bug_names;
  for (BugId b : summary.spec.base.bugs.enabled_list()) bug_names.emplace_back(bug_name(b));
  j["bugs"] = bug_names;
  j["params"] = {
      {"arms", summary.spec.base.num_arms},
      {"alpha", summary.spec.base.alpha},
      {"gamma", summary.spec.base.gamma},
      {"eta", summary.spec.base.eta},
      {"epsilon", summary.spec.base.epsilon},
      {"test_length", summary.spec.base.test_length},
      {"mutants_per_interesting", summary.spec.base.mutants_per_interesting},
  };

  nlohmann::json algos = nlohmann::json::object();
  for (const AlgoSummary& a : summary.algos) {
    nlohmann::json ja;
    ja["final_coverage_per_trial"] = a.final_coverage_per_trial;
    ja["median_final_coverage"] = a.median_final_coverage;
    ja["median_coverage_percent"] = a.median_coverage_percent;
    ja["resets_per_trial"] = a.resets_per_trial;
    ja["median_resets"] = a.median_resets;

    nlohmann::json detections = nlohmann::json::object();
    for (const auto& [bug, stats] : a.bugs) {
      nlohmann::json jb;
      nlohmann::json per_trial = nlohmann::json::array();
      for (const auto& idx : stats.per_trial) {
        if (idx)
          per_trial.push_back(*idx);
        else
          per_trial.push_back(nullptr);
      }
      jb["per_trial"] = std::move(per_trial);
      jb["median"] = optional_to_json(stats.median);
      if (a.algo != SchedulerKind::Fifo) jb["speedup_vs_fifo"] = optional_to_json(stats.speedup_vs_fifo);
      detections[std::string(bug_name(bug))] = std::move(jb);
    }
    ja["detections"] = std::move(detections);

    if (a.algo != SchedulerKind::Fifo) {
      nlohmann::json per_trial = nlohmann::json::array();
      for (const auto& s : a.coverage_speedup_per_trial) per_trial.push_back(optional_to_json(s));
      ja["coverage_speedup_per_trial"] = std::move(per_trial);
      ja["coverage_speedup_vs_fifo"] = optional_to_json(a.coverage_speedup_vs_fifo);
      ja["coverage_increment_pp"] = optional_to_json(a.coverage_increment_pp);
    }
    algos[std::string(scheduler_name(a.algo))] = std::move(ja);
  }
  j["algorithms"] = std::move(algos);
  return j.dump(2) + "\n";
}

std::string emit_table(const ExperimentSummary& summary) {
  static constexpr const char* kNotDetected = "—";  // em dash

  const AlgoSummary* fifo = summary.find(SchedulerKind::Fifo);
  std::vector<const AlgoSummary*> columns;
  for (SchedulerKind kind :
       {SchedulerKind::EpsilonGreedy, SchedulerKind::Ucb, SchedulerKind::Exp3})
    if (const AlgoSummary* a = summary.find(kind)) columns.push_back(a);

  const auto fmt_median = [&](const std::optional<double>& m) -> std::string {
    if (!m) return kNotDetected;
    if (*m == std::floor(*m)) return std::to_string(static_cast<std::int64_t>(*m));
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << *m;
    return os.str();
  };
  const auto fmt_speedup = [&](const std::optional<double>& s) -> std::string {
    if (!s) return kNotDetected;
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << *s << "x";
    return os.str();
  };

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"Bug", "fifo #tests"};
  for (const AlgoSummary* a : columns) header.emplace_back(std::string(scheduler_name(a->algo)));
  rows.push_back(header);

  for (BugId bug : summary.spec.base.bugs.enabled_list()) {
    std::vector<std::string> row;
    row.emplace_back(bug_name(bug));
    row.push_back(fifo ? fmt_median(fifo->bugs.at(bug).median) : kNotDetected);
    for (const AlgoSummary* a : columns) row.push_back(fmt_speedup(a->bugs.at(bug).speedup_vs_fifo));
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(rows.front().size(), 0);
  const auto display_width = [](const std::string& s) {
    // The em dash is the only multi-byte string we emit.
    std::size_t w = 0;
    for (std::size_t i = 0; i < s.size();) {
      i += (s[i] & 0x80) ? 3 : 1;
      ++w;
    }
    return w;
  };
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], display_width(row[c]));

  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size())
        os << std::string(widths[c] - display_width(row[c]) + 2, ' ');
    }
    os << "\n";
  }
  return os.str();
}

void write_curve_csv(const std::filesystem::path& path, const CampaignReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::string buf;
  buf.reserve(64);
  out << "t,arm_id,reward,new_local,new_global,cum_cov,reset,bugs_detected\n";
  for (const IterationRecord& rec : report.iterations) {
    buf.clear();
    buf += std::to_string(rec.t);
    buf += ',';
    buf += std::to_string(rec.arm_id);
    buf += ',';
    buf += format_double(rec.reward);
    buf += ',';
    buf += std::to_string(rec.new_local);
    buf += ',';
    buf += std::to_string(rec.new_global);
    buf += ',';
    buf += std::to_string(rec.cum_cov);
    buf += ',';
    buf += reset_label(rec.reset);
    buf += ',';
    buf += std::to_string(rec.bugs_detected);
    buf += '\n';
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_repro_files(const std::filesystem::path& repro_dir, SchedulerKind algo, int trial,
                       const CampaignReport& report) {
  for (const BugDetection& d : report.detections) {
    std::ostringstream stem;
    stem << scheduler_name(algo) << "_t" << trial << "_" << bug_name(d.bug);
    write_test_file(repro_dir / (stem.str() + ".bin"), d.test);

    std::ostringstream txt;
    txt << "bug: " << bug_name(d.bug) << "\n";
    txt << "algorithm: " << scheduler_name(algo) << "\n";
    txt << "trial: " << trial << "\n";
    txt << "seed: " << report.config.rng_seed << "\n";
    txt << "test_index: " << d.test_index << "\n";
    txt << "test_id: " << d.test.id << "\n";
    txt << "words: " << d.test.words.size() << "\n";
    txt << "mismatches:\n";
    for (const Mismatch& m : d.mismatches) txt << format_mismatch(m) << "\n";
    write_text_file(repro_dir / (stem.str() + ".txt"), txt.str());
  }
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec, std::ostream* log) {
  validate(spec);

  struct Task {
    std::size_t algo_index;
    int trial;  // 1-based
    CampaignConfig config;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < spec.algorithms.size(); ++i) {
    for (int trial = 1; trial <= spec.trials; ++trial) {
      CampaignConfig c = spec.base;
      c.scheduler = spec.algorithms[i];
      c.rng_seed = spec.base.rng_seed + static_cast<std::uint64_t>(trial - 1);
      tasks.push_back({i, trial, c});
    }
  }

  std::vector<CampaignReport> reports(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  unsigned jobs = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        IsaTarget target(tasks[i].config.bugs, tasks[i].config.step_cap);
        reports[i] = run(tasks[i].config, target);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (unsigned i = 0; i < jobs; ++i) threads.emplace_back(worker);
  for (std::thread& th : threads) th.join();
  if (error) std::rethrow_exception(error);

  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir / "repro", ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + spec.out_dir.string());

  std::vector<std::vector<CampaignReport>> per_algo(spec.algorithms.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& task = tasks[i];
    std::ostringstream name;
    name << "curve_" << scheduler_name(task.config.scheduler) << "_" << task.trial << ".csv";
    write_curve_csv(spec.out_dir / name.str(), reports[i]);
    write_repro_files(spec.out_dir / "repro", task.config.scheduler, task.trial, reports[i]);
    per_algo[task.algo_index].push_back(std::move(reports[i]));
  }

  ExperimentSummary summary = summarize(spec, per_algo);
  write_text_file(spec.out_dir / "summary.json", summary_to_json(summary));

  if (log) {
    *log << emit_table(summary);
    for (const AlgoSummary& a : summary.algos) {
      *log << scheduler_name(a.algo) << ": median final coverage " << a.median_final_coverage
           << "/" << summary.universe_size << " (" << format_double(a.median_coverage_percent)
           << "%), median resets " << format_double(a.median_resets) << "\n";
    }
  }
  return summary;
}

}  // namespace banditfuzz
