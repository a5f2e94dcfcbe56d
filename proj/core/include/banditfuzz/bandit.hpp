#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "banditfuzz/rng.hpp"

namespace banditfuzz {

// The three scheduling algorithms, each extended with an arm-reset rule so
// they stay effective once a seed stops yielding new coverage.
struct EpsilonGreedy {
  double epsilon = 0.1;
};
struct Ucb {};
struct Exp3 {
  double eta = 0.1;
};
using AlgorithmKind = std::variant<EpsilonGreedy, Ucb, Exp3>;

struct ArmStats {
  int arm_id = 0;
  double q_value = 0.0;    // mean reward since the arm's last reset
  std::int64_t pull_count = 0;
  double weight = 1.0;     // EXP3 only
  double last_prob = 0.0;  // EXP3 selection probability at the most recent refresh
};

// Sequential arm-selection state. One select_arm/update pair per simulated
// test; reset_arm clears a depleted arm's statistics so the scheduler treats
// its replacement seed as fresh.
//
// Draw-consumption contract (fixed so campaigns are bit-reproducible):
//   epsilon-greedy  one uniform variate against epsilon, then, when exploring,
//                   one uniform arm index.
//   argmax ties     (epsilon-greedy exploit path, UCB) one uniform index over
//                   the maximizers, consumed only when two or more arms tie.
//   UCB             arms with pull_count == 0 take priority over the index
//                   Q(a) + sqrt(2 ln t / N(a)); ties as above.
//   EXP3            probabilities are refreshed into last_prob, then one
//                   uniform variate picks the arm by cumulative scan.
class BanditState {
 public:
  BanditState(AlgorithmKind algorithm, int num_arms, int total_points, std::uint64_t rng_seed);

  // Advances the time step and returns the selected arm.
  int select_arm();
  // Delivers the (nonnegative) raw reward earned by the preceding selection.
  void update(int arm, double raw_reward);
  // Treats the arm as brand new: epsilon-greedy/UCB zero its statistics, EXP3
  // sets its weight to the average weight of the other arms.
  void reset_arm(int arm);

  const AlgorithmKind& algorithm() const { return algorithm_; }
  int num_arms() const { return static_cast<int>(arms_.size()); }
  int total_points() const { return total_points_; }
  std::int64_t time_step() const { return time_step_; }
  const ArmStats& arm(int i) const { return arms_.at(i); }

 private:
  int argmax_q();
  int select_ucb();
  int select_exp3(double eta);
  int pick_among(const std::vector<int>& candidates);
  void check_arm(int arm) const;
  void rescale_weights_if_needed();

  AlgorithmKind algorithm_;
  std::vector<ArmStats> arms_;
  std::int64_t time_step_ = 0;
  int total_points_;
  Rng rng_;
};

}  // namespace banditfuzz
