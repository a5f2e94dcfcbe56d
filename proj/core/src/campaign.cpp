#include "banditfuzz/campaign.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "banditfuzz/coverage.hpp"
#include "banditfuzz/rng.hpp"

namespace banditfuzz {

namespace {

// Stream tags: scheduler draws and test generation must not perturb each
// other, so a FIFO campaign and a bandit campaign with the same seed share
// the same test-generation sequence.
constexpr std::uint64_t kBanditStream = 1;
constexpr std::uint64_t kTestgenStream = 2;

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string_view scheduler_name(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::EpsilonGreedy: return "egreedy";
    case SchedulerKind::Ucb: return "ucb";
    case SchedulerKind::Exp3: return "exp3";
    case SchedulerKind::Fifo: return "fifo";
  }
  return "?";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) {
  if (name == "egreedy") return SchedulerKind::EpsilonGreedy;
  if (name == "ucb") return SchedulerKind::Ucb;
  if (name == "exp3") return SchedulerKind::Exp3;
  if (name == "fifo") return SchedulerKind::Fifo;
  return std::nullopt;
}

void validate(const CampaignConfig& c) {
  if (c.num_arms < 1) throw std::invalid_argument("arms must be at least 1");
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0))
    throw std::invalid_argument("alpha must be in [0,1] (got " + format_number(c.alpha) + ")");
  if (c.gamma < 1) throw std::invalid_argument("gamma must be at least 1");
  if (!(c.eta > 0.0 && c.eta <= 1.0))
    throw std::invalid_argument("eta must be in (0,1] (got " + format_number(c.eta) + ")");
  if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0))
    throw std::invalid_argument("epsilon must be in [0,1] (got " + format_number(c.epsilon) + ")");
  if (c.budget < 1) throw std::invalid_argument("budget must be at least 1");
  if (c.max_test_length < 1) throw std::invalid_argument("max test length must be at least 1");
  if (c.test_length < 1 || c.test_length > c.max_test_length)
    throw std::invalid_argument("test_length must be in [1," +
                                std::to_string(c.max_test_length) + "]");
  if (c.mutants_per_interesting < 1)
    throw std::invalid_argument("mutants_per_interesting must be at least 1");
  double weight_sum = 0.0;
  for (double w : c.operator_weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("operator_weights must be nonnegative");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw std::invalid_argument("operator_weights must sum to 1");
  if (c.step_cap < 1) throw std::invalid_argument("step_cap must be at least 1");
}

std::string reset_label(std::uint8_t flags) {
  switch (flags) {
    case 0: return "0";
    case kResetEmpty: return "empty";
    case kResetSaturated: return "sat";
    case kResetEmpty | kResetSaturated: return "empty+sat";
  }
  return "?";
}

std::optional<std::int64_t> CampaignReport::detection_index(BugId bug) const {
  for (const BugDetection& d : detections)
    if (d.bug == bug) return d.test_index;
  return std::nullopt;
}

namespace {

AlgorithmKind make_algorithm(const CampaignConfig& c) {
  switch (c.scheduler) {
    case SchedulerKind::EpsilonGreedy: return EpsilonGreedy{c.epsilon};
    case SchedulerKind::Ucb: return Ucb{};
    case SchedulerKind::Exp3: return Exp3{c.eta};
    case SchedulerKind::Fifo: break;
  }
  throw std::invalid_argument("FIFO scheduler has no bandit algorithm");
}

// Detection bookkeeping shared between the bandit loop and the baseline.
class BugTracker {
 public:
  explicit BugTracker(const BugConfig& bugs) : enabled_(bugs.enabled_list()) {}

  void check(Target& target, const Test& test, std::int64_t test_index,
             const std::vector<Mismatch>& observed, CampaignReport& report) {
    if (observed.empty() || detected_count_ == static_cast<int>(enabled_.size())) return;
    for (BugId bug : enabled_) {
      if (found_[static_cast<int>(bug)]) continue;
      std::vector<Mismatch> evidence = target.bug_evidence(test, bug);
      if (evidence.empty()) continue;
      found_[static_cast<int>(bug)] = true;
      ++detected_count_;
      report.detections.push_back({bug, test_index, test, std::move(evidence)});
    }
  }

  int detected_count() const { return detected_count_; }

 private:
  std::vector<BugId> enabled_;
  std::array<bool, kNumBugs> found_{};
  int detected_count_ = 0;
};

}  // namespace

CampaignReport run_campaign(const CampaignConfig& config, Target& target) {
  validate(config);
  if (config.scheduler == SchedulerKind::Fifo)
    throw std::invalid_argument("run_campaign requires a bandit scheduler; use run_baseline");

  const int universe = target.universe_size();
  BanditState bandit(make_algorithm(config), config.num_arms, universe,
                     derive_stream(config.rng_seed, kBanditStream));
  Rng gen_rng(derive_stream(config.rng_seed, kTestgenStream));
  TestIdAllocator ids;
  CoverageLedger ledger(universe, config.num_arms);
  SaturationMonitor monitor(config.gamma, config.num_arms);
  const MutationConfig mutation{config.mutants_per_interesting, config.operator_weights};
  const RewardParams reward_params{config.alpha, config.disjoint_reward};

  struct ArmRuntime {
    bool initialized = false;
    Test current_seed;
    TestPool pool;
  };
  std::vector<ArmRuntime> arms(config.num_arms);

  CampaignReport report;
  report.config = config;
  report.universe_size = universe;
  report.iterations.reserve(static_cast<std::size_t>(config.budget));
  BugTracker tracker(config.bugs);

  const auto replace_arm = [&](int arm) {
    ArmRuntime& rt = arms[arm];
    rt.current_seed = gen_seed(gen_rng, ids, arm, config.test_length);
    rt.pool.clear();
    rt.pool.push(rt.current_seed);
    ledger.clear_arm(arm);
    monitor.clear_arm(arm);
    bandit.reset_arm(arm);
    ++report.total_resets;
  };
  const auto all_pools_empty = [&] {
    for (const ArmRuntime& rt : arms)
      if (!rt.initialized || !rt.pool.empty()) return false;
    return true;
  };

  for (std::int64_t t = 1; t <= config.budget; ++t) {
    int arm = -1;
    std::optional<Test> test;
    std::uint8_t reset_flags = 0;
    bool exhausted = false;
    for (;;) {
      arm = bandit.select_arm();
      ArmRuntime& rt = arms[arm];
      if (!rt.initialized) {
        // Seeds are drawn lazily, in selection order, from the same stream
        // the baseline consumes eagerly.
        rt.current_seed = gen_seed(gen_rng, ids, arm, config.test_length);
        rt.pool.push(rt.current_seed);
        rt.initialized = true;
      }
      test = rt.pool.pop();
      if (test) break;
      if (config.reseed_on_empty) {
        reset_flags |= kResetEmpty;
        replace_arm(arm);
        test = arms[arm].pool.pop();
        break;
      }
      if (all_pools_empty()) {
        exhausted = true;
        break;
      }
    }
    if (exhausted) break;

    ExecutionResult result = target.run(*test);
    const CoverageLedger::Delta delta = ledger.record_execution(arm, result.covered);
    const double reward = compute_reward(delta.new_local, delta.new_global, reward_params);
    bandit.update(arm, reward);

    const bool interesting =
        config.interesting_local ? !delta.new_local.empty() : !delta.new_global.empty();
    if (interesting)
      for (Test& m : mutate(*test, gen_rng, ids, mutation)) arms[arm].pool.push(std::move(m));

    if (config.saturation_resets && monitor.observe(arm, delta.new_local.count())) {
      reset_flags |= kResetSaturated;
      replace_arm(arm);
    }

    tracker.check(target, *test, t, diff(result.dut_trace, result.golden_trace), report);

    report.iterations.push_back({t, arm, reward, delta.new_local.count(),
                                 delta.new_global.count(), ledger.global_covered().count(),
                                 reset_flags, tracker.detected_count()});
  }

  report.total_tests = static_cast<std::int64_t>(report.iterations.size());
  report.final_coverage = ledger.global_covered().count();
  return report;
}

CampaignReport run_baseline(const CampaignConfig& config, Target& target) {
  validate(config);
  if (config.scheduler != SchedulerKind::Fifo)
    throw std::invalid_argument("run_baseline requires the FIFO scheduler");

  const int universe = target.universe_size();
  Rng gen_rng(derive_stream(config.rng_seed, kTestgenStream));
  TestIdAllocator ids;
  // One pseudo-arm: "local" and "global" coverage coincide.
  CoverageLedger ledger(universe, 1);
  const MutationConfig mutation{config.mutants_per_interesting, config.operator_weights};
  const RewardParams reward_params{config.alpha, config.disjoint_reward};

  TestPool pool;
  for (int i = 0; i < config.num_arms; ++i)
    pool.push(gen_seed(gen_rng, ids, 0, config.test_length));

  CampaignReport report;
  report.config = config;
  report.universe_size = universe;
  report.iterations.reserve(static_cast<std::size_t>(config.budget));
  BugTracker tracker(config.bugs);

  for (std::int64_t t = 1; t <= config.budget; ++t) {
    std::optional<Test> test = pool.pop();
    if (!test) test = gen_seed(gen_rng, ids, 0, config.test_length);

    ExecutionResult result = target.run(*test);
    const CoverageLedger::Delta delta = ledger.record_execution(0, result.covered);
    const double reward = compute_reward(delta.new_local, delta.new_global, reward_params);

    if (!delta.new_global.empty())
      for (Test& m : mutate(*test, gen_rng, ids, mutation)) pool.push(std::move(m));

    tracker.check(target, *test, t, diff(result.dut_trace, result.golden_trace), report);

    report.iterations.push_back({t, 0, reward, delta.new_local.count(), delta.new_global.count(),
                                 ledger.global_covered().count(), 0, tracker.detected_count()});
  }

  report.total_tests = static_cast<std::int64_t>(report.iterations.size());
  report.final_coverage = ledger.global_covered().count();
  return report;
}

CampaignReport run(const CampaignConfig& config, Target& target) {
  return config.scheduler == SchedulerKind::Fifo ? run_baseline(config, target)
                                                 : run_campaign(config, target);
}

SpeedupReport speedup(const CampaignReport& base, const CampaignReport& treatment) {
  if (base.config.budget != treatment.config.budget)
    throw std::invalid_argument("speedup requires matching budgets");
  if (!(base.config.bugs == treatment.config.bugs))
    throw std::invalid_argument("speedup requires matching bug configurations");
  if (base.universe_size != treatment.universe_size)
    throw std::invalid_argument("speedup requires matching coverage universes");

  SpeedupReport out;
  for (BugId bug : base.config.bugs.enabled_list()) {
    SpeedupReport::PerBug pb;
    pb.bug = bug;
    pb.base_tests = base.detection_index(bug);
    pb.treatment_tests = treatment.detection_index(bug);
    if (pb.base_tests && pb.treatment_tests)
      pb.speedup = static_cast<double>(*pb.base_tests) / static_cast<double>(*pb.treatment_tests);
    out.bugs.push_back(pb);
  }

  const auto first_reach = [](const CampaignReport& r, int cov) -> std::optional<std::int64_t> {
    for (const IterationRecord& rec : r.iterations)
      if (rec.cum_cov >= cov) return rec.t;
    return std::nullopt;
  };
  const int target_cov = treatment.final_coverage;
  const auto treat_t = first_reach(treatment, target_cov);
  const auto base_t = first_reach(base, target_cov);
  out.base_reached_treatment_coverage = base_t.has_value();
  if (base_t && treat_t)
    out.coverage_speedup = static_cast<double>(*base_t) / static_cast<double>(*treat_t);
  out.coverage_increment_pp = 100.0 *
                              static_cast<double>(treatment.final_coverage - base.final_coverage) /
                              static_cast<double>(base.universe_size);
  return out;
}

}  // namespace banditfuzz
