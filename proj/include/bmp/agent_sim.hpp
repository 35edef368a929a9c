#pragma once
// Ground-truth semantics of the myopic agent with adversarial tie-breaking.
// Given a stationary schedule, each type maximizes its immediate total reward
// R_theta(s,a) + gamma(s,a) per state; among optimal actions the adversary
// first tries to break the reach requirement and otherwise maximizes the
// principal's expected payment. This module is the independent oracle every
// solver's output is verified against.

#include <algorithm>
#include <cmath>
#include <vector>

#include "bmp/mdp.hpp"
#include "bmp/reachability.hpp"
#include "bmp/schedule.hpp"
#include "bmp/simplex.hpp"

namespace bmp {

struct BestResponse {
  // per-state sets of optimal local action indices (empty off the live set)
  std::vector<std::vector<int>> optimal;
  std::vector<char> unique;
  double tie_tol = 0.0;
};

inline double default_tie_tol(const MdpModel& m, const TypeSet& types,
                              const IncentiveSchedule& sched) {
  double mr = 0.0, mg = 0.0;
  for (const auto& row : types.reward)
    for (double v : row) mr = std::max(mr, std::fabs(v));
  for (int i = 0; i < m.sa_total; ++i) mg = std::max(mg, sched.offers[i]);
  return 1e-7 * (1.0 + mr + mg);
}

inline BestResponse best_response(const MdpModel& m, const TypeSet& types, int theta,
                                  const StatePartition& part, const IncentiveSchedule& sched,
                                  double tie_tol = -1.0) {
  if (tie_tol < 0.0) tie_tol = default_tie_tol(m, types, sched);
  BestResponse br;
  br.tie_tol = tie_tol;
  br.optimal.resize(m.num_states());
  br.unique.assign(m.num_states(), 1);
  for (int s : part.live_states) {
    double best = -kInf;
    for (int k = 0; k < m.num_local(s); ++k)
      best = std::max(best, types.reward[theta][m.sa_index(s, k)] + sched.offers[m.sa_index(s, k)]);
    for (int k = 0; k < m.num_local(s); ++k)
      if (types.reward[theta][m.sa_index(s, k)] + sched.offers[m.sa_index(s, k)] >=
          best - tie_tol)
        br.optimal[s].push_back(k);
    br.unique[s] = br.optimal[s].size() == 1 ? 1 : 0;
  }
  return br;
}

struct AdversarialOutcome {
  bool feasible = false;
  std::vector<int> policy;  // global action ids on live states, -1 elsewhere
  double reach = 0.0;
  double cost = 0.0;  // kInf when payments diverge
};

// Two-phase adversary over the policies restricted to the optimal-action
// sets: (i) minimize reach probability (value iteration to the least fixed
// point); below R_max the schedule is infeasible for this type; (ii) maximize
// expected payments via an occupancy LP over the restricted, reachable part.
inline AdversarialOutcome adversarial_outcome(const MdpModel& m, const StatePartition& part,
                                              const BestResponse& br,
                                              const IncentiveSchedule& sched, double rmax) {
  const int n = m.num_states();
  const auto r = reach_reward(m, part);
  AdversarialOutcome out;
  out.policy.assign(n, -1);
  if (!part.in_live[m.initial]) {
    out.feasible = part.in_target[m.initial] || rmax <= 1e-7;
    out.reach = part.in_target[m.initial] ? 1.0 : 0.0;
    return out;
  }

  // phase (i): least fixed point of the min-reach operator from 0
  std::vector<double> p(n, 0.0);
  for (int s = 0; s < n; ++s)
    if (part.in_target[s]) p[s] = 1.0;
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double delta = 0.0;
    for (int s : part.live_states) {
      double best = kInf;
      for (int k : br.optimal[s]) {
        double v = r[m.sa_index(s, k)];
        for (const auto& o : m.trans[s][k])
          if (part.in_live[o.to]) v += o.prob * p[o.to];
        best = std::min(best, v);
      }
      delta = std::max(delta, std::fabs(best - p[s]));
      p[s] = best;
    }
    if (delta < 1e-13) break;
  }
  if (p[m.initial] < rmax - 1e-7) {
    out.feasible = false;
    out.reach = p[m.initial];
    for (int s : part.live_states) {
      int pick = br.optimal[s].front();
      double best = kInf;
      for (int k : br.optimal[s]) {
        double v = r[m.sa_index(s, k)];
        for (const auto& o : m.trans[s][k])
          if (part.in_live[o.to]) v += o.prob * p[o.to];
        if (v < best - 1e-12) {
          best = v;
          pick = k;
        }
      }
      out.policy[s] = m.avail[s][pick];
    }
    return out;
  }

  // phase (ii): forward closure under the restricted actions, then maximize
  // payments over occupancy measures with the reach requirement
  std::vector<char> seen(n, 0);
  std::vector<int> stack{m.initial};
  seen[m.initial] = 1;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    if (!part.in_live[s]) continue;
    for (int k : br.optimal[s])
      for (const auto& o : m.trans[s][k])
        if (o.prob > 1e-12 && !seen[o.to]) {
          seen[o.to] = 1;
          stack.push_back(o.to);
        }
  }
  std::vector<int> col(m.sa_total, -1);
  LinearProgram lp;
  for (int s : part.live_states)
    if (seen[s])
      for (int k : br.optimal[s])
        col[m.sa_index(s, k)] = lp.add_var(0.0, kInf, -sched.offers[m.sa_index(s, k)]);
  for (int s : part.live_states) {
    if (!seen[s]) continue;
    std::vector<double> coef(lp.num_vars, 0.0);
    for (int k : br.optimal[s]) coef[col[m.sa_index(s, k)]] += 1.0;
    for (int sp : part.live_states) {
      if (!seen[sp]) continue;
      for (int k : br.optimal[sp])
        for (const auto& o : m.trans[sp][k])
          if (o.to == s) coef[col[m.sa_index(sp, k)]] -= o.prob;
    }
    std::vector<RowEntry> row;
    for (int j = 0; j < lp.num_vars; ++j)
      if (coef[j] != 0.0) row.push_back({j, coef[j]});
    lp.add_row(row, Rel::EQ, s == m.initial ? 1.0 : 0.0);
  }
  {
    std::vector<RowEntry> row;
    for (int i = 0; i < m.sa_total; ++i)
      if (col[i] >= 0 && r[i] > 0.0) row.push_back({col[i], r[i]});
    lp.add_row(row, Rel::GE, rmax - 1e-7);
  }
  auto st = solve_lp(lp);
  out.feasible = true;
  out.reach = p[m.initial];
  if (st.result == SolveResult::Unbounded) {
    out.cost = kInf;
    // witness: prefer actions carrying the diverging circulation
    for (int s : part.live_states) {
      int pick = br.optimal[s].front();
      double best = 0.0;
      for (int k : br.optimal[s]) {
        const int j = col[m.sa_index(s, k)];
        const double w = (j >= 0 && !st.ray.empty()) ? st.ray[j] : 0.0;
        if (w > best + 1e-12) {
          best = w;
          pick = k;
        }
      }
      out.policy[s] = m.avail[s][pick];
    }
    return out;
  }
  if (st.result != SolveResult::Optimal)
    throw std::runtime_error("adversarial_outcome: payment LP failed");
  out.cost = -st.objective;
  for (int s : part.live_states) {
    int pick = br.optimal[s].front();
    double best = 0.0;
    for (int k : br.optimal[s]) {
      const int j = col[m.sa_index(s, k)];
      const double w = j >= 0 ? st.x[j] : 0.0;
      if (w > best + 1e-12) {
        best = w;
        pick = k;
      }
    }
    out.policy[s] = m.avail[s][pick];
  }
  return out;
}

struct VerificationReport {
  bool feasible = false;
  double worst_case_cost = 0.0;  // kInf possible
  std::vector<AdversarialOutcome> per_type;
  std::vector<BestResponse> responses;
};

inline VerificationReport verify_schedule(const MdpModel& m, const TypeSet& types,
                                          const StatePartition& part,
                                          const IncentiveSchedule& sched, double tie_tol = -1.0) {
  VerificationReport rep;
  const double rmax = max_reach(m, part).rmax;
  rep.feasible = true;
  rep.worst_case_cost = 0.0;
  for (int theta = 0; theta < types.num_types(); ++theta) {
    auto br = best_response(m, types, theta, part, sched, tie_tol);
    auto oc = adversarial_outcome(m, part, br, sched, rmax);
    if (!oc.feasible) rep.feasible = false;
    rep.worst_case_cost = std::max(rep.worst_case_cost, oc.cost);
    rep.per_type.push_back(std::move(oc));
    rep.responses.push_back(std::move(br));
  }
  if (!rep.feasible) rep.worst_case_cost = kInf;
  return rep;
}

}  // namespace bmp
