#pragma once

// From-scratch reference for the coverage ledger, kept independent of the
// library's bitset implementation (plain std::set bookkeeping).

#include <algorithm>
#include <map>
#include <set>
#include <vector>

namespace banditfuzz::testing {

class ReferenceLedger {
 public:
  struct Delta {
    std::vector<int> new_local;
    std::vector<int> new_global;
  };

  Delta record(int arm, const std::vector<int>& covered) {
    Delta d;
    std::set<int>& local = per_arm_[arm];
    for (int p : covered) {
      if (!local.count(p)) d.new_local.push_back(p);
      if (!local.count(p) && !global_.count(p)) d.new_global.push_back(p);
    }
    std::sort(d.new_local.begin(), d.new_local.end());
    d.new_local.erase(std::unique(d.new_local.begin(), d.new_local.end()), d.new_local.end());
    std::sort(d.new_global.begin(), d.new_global.end());
    d.new_global.erase(std::unique(d.new_global.begin(), d.new_global.end()), d.new_global.end());
    for (int p : d.new_local) local.insert(p);
    for (int p : d.new_global) global_.insert(p);
    return d;
  }

  void clear_arm(int arm) { per_arm_[arm].clear(); }

  std::vector<int> global_points() const { return {global_.begin(), global_.end()}; }
  std::vector<int> arm_points(int arm) const {
    auto it = per_arm_.find(arm);
    if (it == per_arm_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

 private:
  std::set<int> global_;
  std::map<int, std::set<int>> per_arm_;
};

}  // namespace banditfuzz::testing
