#pragma once
// Stationary incentive schedules: nonnegative offers per live state-action
// pair, plus the strict-preference margin they were synthesized with.

#include <vector>

#include "bmp/mdp.hpp"

namespace bmp {

struct IncentiveSchedule {
  std::vector<double> offers;  // sa-indexed, >= 0, zero off the live set
  double epsilon = 0.0;        // strict-preference margin used at synthesis time
  bool single_action = false;  // at most one positive offer per state

  static IncentiveSchedule zero(const MdpModel& m) {
    IncentiveSchedule s;
    s.offers.assign(m.sa_total, 0.0);
    return s;
  }

  // true when the contents satisfy the declared invariants
  bool consistent(const MdpModel& m, const StatePartition& part) const {
    if (static_cast<int>(offers.size()) != m.sa_total) return false;
    for (int s = 0; s < m.num_states(); ++s) {
      int positive = 0;
      for (int k = 0; k < m.num_local(s); ++k) {
        const double v = offers[m.sa_index(s, k)];
        if (v < 0.0) return false;
        if (!part.in_live[s] && v != 0.0) return false;
        if (v > 0.0) ++positive;
      }
      if (single_action && positive > 1) return false;
    }
    return true;
  }
};

}  // namespace bmp
