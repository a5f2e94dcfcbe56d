#pragma once

// Textbook reference implementations of the three schedulers, coded
// independently of the library and used only to cross-check selection
// sequences. They follow the same draw-consumption convention documented on
// BanditState (one variate against epsilon, tie-break draws only on actual
// ties, one variate per EXP3 sample) so that sequences are comparable under a
// shared RNG stream.

#include <cmath>
#include <vector>

#include "banditfuzz/rng.hpp"

namespace banditfuzz::testing {

inline int argmax_with_ties(Rng& rng, const std::vector<double>& scores) {
  double best = scores[0];
  for (double s : scores)
    if (s > best) best = s;
  std::vector<int> ties;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] == best) ties.push_back(static_cast<int>(i));
  if (ties.size() == 1) return ties[0];
  return ties[rng.next_index(ties.size())];
}

class TextbookEpsilonGreedy {
 public:
  TextbookEpsilonGreedy(int num_arms, double epsilon, std::uint64_t seed)
      : epsilon_(epsilon), q_(num_arms, 0.0), n_(num_arms, 0), rng_(seed) {}

  int select() {
    const double u = rng_.next_double();
    if (u < epsilon_) return static_cast<int>(rng_.next_index(q_.size()));
    return argmax_with_ties(rng_, q_);
  }

  void update(int arm, double reward) {
    ++n_[arm];
    q_[arm] += (reward - q_[arm]) / static_cast<double>(n_[arm]);
  }

 private:
  double epsilon_;
  std::vector<double> q_;
  std::vector<long> n_;
  Rng rng_;
};

class TextbookUcb {
 public:
  TextbookUcb(int num_arms, std::uint64_t seed) : q_(num_arms, 0.0), n_(num_arms, 0), rng_(seed) {}

  int select() {
    ++t_;
    std::vector<int> unpulled;
    for (std::size_t i = 0; i < n_.size(); ++i)
      if (n_[i] == 0) unpulled.push_back(static_cast<int>(i));
    if (unpulled.size() == 1) return unpulled[0];
    if (!unpulled.empty()) return unpulled[rng_.next_index(unpulled.size())];

    std::vector<double> index(q_.size());
    for (std::size_t i = 0; i < q_.size(); ++i)
      index[i] = q_[i] + std::sqrt(2.0 * std::log(static_cast<double>(t_)) /
                                   static_cast<double>(n_[i]));
    return argmax_with_ties(rng_, index);
  }

  void update(int arm, double reward) {
    ++n_[arm];
    q_[arm] += (reward - q_[arm]) / static_cast<double>(n_[arm]);
  }

 private:
  std::vector<double> q_;
  std::vector<long> n_;
  long t_ = 0;
  Rng rng_;
};

class TextbookExp3 {
 public:
  TextbookExp3(int num_arms, double eta, std::uint64_t seed)
      : eta_(eta), w_(num_arms, 1.0), p_(num_arms, 0.0), rng_(seed) {}

  int select() {
    double total = 0.0;
    for (double w : w_) total += w;
    const int n = static_cast<int>(w_.size());
    for (int i = 0; i < n; ++i) p_[i] = (1.0 - eta_) * w_[i] / total + eta_ / n;
    const double u = rng_.next_double();
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
      cum += p_[i];
      if (u < cum) return i;
    }
    return n - 1;
  }

  void update(int arm, double reward) {
    const double x = reward / p_[arm];
    w_[arm] *= std::exp(eta_ * x / static_cast<double>(w_.size()));
  }

 private:
  double eta_;
  std::vector<double> w_;
  std::vector<double> p_;
  Rng rng_;
};

}  // namespace banditfuzz::testing
