#pragma once
// Common result record emitted by every solver pipeline.

#include <string>
#include <vector>

#include "bmp/agent_sim.hpp"

namespace bmp {

struct SolveReport {
  std::string method;            // "bmpd", "nbmp-milp", "nsbmp-milp", "nbmp-ccp", ...
  bool feasible = false;         // a verified schedule was produced
  bool proven_optimal = false;   // solver closed the gap (within its tolerances)
  double worst_case_cost = 0.0;  // verified worst-case expected payment
  double lower_bound = 0.0;      // best known lower bound on the optimum
  double epsilon = 0.0;          // strict-preference margin used
  std::vector<double> per_type_reach;
  std::vector<double> per_type_cost;
  long iterations = 0;  // simplex pivots / tree nodes / CCP iterations
  std::string diagnostics;

  double suboptimality_ratio() const {
    if (lower_bound <= 0.0) return worst_case_cost > 0.0 ? kInf : 1.0;
    return worst_case_cost / lower_bound;
  }

  void fill_from(const VerificationReport& v) {
    feasible = v.feasible;
    worst_case_cost = v.worst_case_cost;
    per_type_reach.clear();
    per_type_cost.clear();
    for (const auto& oc : v.per_type) {
      per_type_reach.push_back(oc.reach);
      per_type_cost.push_back(oc.cost);
    }
  }
};

}  // namespace bmp
