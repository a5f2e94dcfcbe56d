// Command-line front end: builds an experiment grid from an optional JSON
// config file plus flags (flags win), runs it, and prints the speedup table.

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "banditfuzz/experiment.hpp"

namespace {

struct FlagValues {
  std::string config_file;
  std::string algo;
  int arms = 0;
  double alpha = 0.0;
  int gamma = 0;
  double eta = 0.0;
  double epsilon = 0.0;
  std::int64_t budget = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::string bugs;
  std::string out;
  int jobs = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-guided instruction fuzzer with bandit-driven seed scheduling"};
  FlagValues f;

  app.add_option("config", f.config_file, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  app.add_option("--algo", f.algo, "Scheduler: one of egreedy|ucb|exp3|fifo (default: all four)");
  app.add_option("--arms", f.arms, "Number of arms (seeds) for bandit schedulers");
  app.add_option("--alpha", f.alpha, "Weight of local vs global new coverage in the reward");
  app.add_option("--gamma", f.gamma, "Zero-coverage picks before an arm is replaced");
  app.add_option("--eta", f.eta, "EXP3 learning rate");
  app.add_option("--epsilon", f.epsilon, "Exploration rate of the epsilon-greedy scheduler");
  app.add_option("--budget", f.budget, "Tests to execute per campaign");
  app.add_option("--trials", f.trials, "Seeds per configuration");
  app.add_option("--seed", f.seed, "Base RNG seed (trial k uses seed+k)");
  app.add_option("--bugs", f.bugs, "Comma list of B1..B7, or 'all'/'none'");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--jobs", f.jobs, "Worker threads (default: available parallelism)");

  CLI11_PARSE(app, argc, argv);

  banditfuzz::ExperimentSpec spec;
  try {
    if (!f.config_file.empty()) banditfuzz::apply_config_file(spec, f.config_file);

    if (app.count("--algo")) {
      const auto kind = banditfuzz::parse_scheduler(f.algo);
      if (!kind) throw std::invalid_argument("algo must be one of egreedy|ucb|exp3|fifo");
      spec.algorithms = {*kind};
    }
    if (app.count("--arms")) spec.base.num_arms = f.arms;
    if (app.count("--alpha")) spec.base.alpha = f.alpha;
    if (app.count("--gamma")) spec.base.gamma = f.gamma;
    if (app.count("--eta")) spec.base.eta = f.eta;
    if (app.count("--epsilon")) spec.base.epsilon = f.epsilon;
    if (app.count("--budget")) spec.base.budget = f.budget;
    if (app.count("--trials")) spec.trials = f.trials;
    if (app.count("--seed")) spec.base.rng_seed = f.seed;
    if (app.count("--bugs")) spec.base.bugs = banditfuzz::BugConfig::parse(f.bugs);
    if (app.count("--out")) spec.out_dir = f.out;
    if (app.count("--jobs")) spec.jobs = f.jobs;

    banditfuzz::validate(spec);
  } catch (const std::exception& e) {
    std::cerr << "banditfuzz: error: " << e.what() << "\n";
    return 2;
  }

  try {
    banditfuzz::run_experiment(spec, &std::cout);
  } catch (const std::exception& e) {
    std::cerr << "banditfuzz: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
