#pragma once
// Polynomial-time pipeline: the conservative baseline that works for every
// type set, dominant-type detection, and the exact two-LP solver for the
// dominant-type problem with incentive extraction.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bmp/agent_sim.hpp"
#include "bmp/mdp.hpp"
#include "bmp/reachability.hpp"
#include "bmp/report.hpp"
#include "bmp/schedule.hpp"

namespace bmp {

// Incentive amount under which every type strictly prefers (s,a):
// C(s,a) = max over types of (R^max_theta(s) - R_theta(s,a)) + eps, on the
// live set.
inline std::vector<double> conservative_cost(const MdpModel& m, const TypeSet& types,
                                             const StatePartition& part, double eps) {
  std::vector<double> c(m.sa_total, 0.0);
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      double deficit = 0.0;
      for (int theta = 0; theta < types.num_types(); ++theta)
        deficit = std::max(deficit, types.rmax[theta][s] - types.reward[theta][i]);
      c[i] = deficit + eps;
    }
  return c;
}

// Incentivize a max-reach witness policy at the conservative amounts. Every
// type follows the witness, so a single chain evaluation gives the cost.
inline std::pair<IncentiveSchedule, double> conservative_baseline(const MdpModel& m,
                                                                  const TypeSet& types,
                                                                  const StatePartition& part,
                                                                  double eps) {
  auto cost = conservative_cost(m, types, part, eps);
  auto reach = max_reach(m, part);
  IncentiveSchedule sched = IncentiveSchedule::zero(m);
  sched.epsilon = eps;
  sched.single_action = true;
  for (int s : part.live_states) {
    const int k = m.local_of(s, reach.witness[s]);
    sched.offers[m.sa_index(s, k)] = cost[m.sa_index(s, k)];
  }
  auto [rp, cv] = evaluate_chain(m, part, reach.witness, sched.offers);
  (void)rp;
  return {sched, cv};
}

// Deficit of type theta at (s,a): how much the agent forgoes by taking a.
inline double deficit(const TypeSet& types, const MdpModel& m, int theta, int s, int k) {
  return types.rmax[theta][s] - types.reward[theta][m.sa_index(s, k)];
}

// A dominant type's deficit table pointwise dominates every other type's.
inline std::optional<int> find_dominant_type(const MdpModel& m, const TypeSet& types) {
  const double tol = 1e-12;
  for (int d = 0; d < types.num_types(); ++d) {
    bool ok = true;
    for (int theta = 0; theta < types.num_types() && ok; ++theta) {
      if (theta == d) continue;
      for (int s = 0; s < m.num_states() && ok; ++s)
        for (int k = 0; k < m.num_local(s); ++k)
          if (deficit(types, m, d, s, k) + tol < deficit(types, m, theta, s, k)) {
            ok = false;
            break;
          }
    }
    if (ok) return d;
  }
  return std::nullopt;
}

// Cost of control for the dominant type: phi(s,a) = deficit + eps_bar on the
// live set.
inline std::vector<double> cost_of_control(const MdpModel& m, const TypeSet& types, int theta_d,
                                           const StatePartition& part, double eps_bar) {
  std::vector<double> phi(m.sa_total, 0.0);
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k)
      phi[m.sa_index(s, k)] = deficit(types, m, theta_d, s, k) + eps_bar;
  return phi;
}

// Exact solver under a dominant type: minimize sum x*phi at maximum reach
// (value upsilon*), tie-break by minimal total residence time, then offer
// phi(s, pi*(s)) on the lowest-index active action of each visited state.
inline std::pair<SolveReport, IncentiveSchedule> solve_bmpd(const MdpModel& m,
                                                            const TypeSet& types, int theta_d,
                                                            const StatePartition& part,
                                                            double eps_bar) {
  const double activity_tol = 1e-7;
  auto phi = cost_of_control(m, types, theta_d, part, eps_bar);
  auto reach = max_reach(m, part);
  const auto r = reach_reward(m, part);

  // LP 1: value of the cheapest max-reach occupancy under phi
  auto [occ1, upsilon] = min_cost_max_reach(m, part, phi);
  (void)occ1;

  // LP 2: among cost-upsilon* occupancies, minimize total residence time
  std::vector<double> ones(m.sa_total, 0.0);
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) ones[m.sa_index(s, k)] = 1.0;
  auto built = build_occupancy_lp(m, part, ones, r, reach.rmax);
  {
    std::vector<RowEntry> row;
    for (int i = 0; i < m.sa_total; ++i)
      if (built.col[i] >= 0 && phi[i] != 0.0) row.push_back({built.col[i], phi[i]});
    built.lp.add_row(row, Rel::EQ, upsilon);
  }
  auto st = solve_lp(built.lp);
  if (st.result != SolveResult::Optimal)
    throw std::runtime_error("solve_bmpd: tie-break LP failed");

  IncentiveSchedule sched = IncentiveSchedule::zero(m);
  sched.epsilon = eps_bar;
  sched.single_action = true;
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) {
      const int j = built.col[m.sa_index(s, k)];
      if (j >= 0 && st.x[j] > activity_tol) {
        sched.offers[m.sa_index(s, k)] = phi[m.sa_index(s, k)];
        break;  // lowest-index active action
      }
    }

  auto ver = verify_schedule(m, types, part, sched);
  for (int theta = 0; theta < types.num_types(); ++theta)
    if (!ver.per_type[theta].feasible)
      throw std::runtime_error("solve_bmpd: dominance violated for type " +
                               types.type_names[theta]);

  SolveReport rep;
  rep.method = "bmpd";
  rep.epsilon = eps_bar;
  rep.fill_from(ver);
  rep.proven_optimal = true;
  rep.lower_bound = upsilon;
  rep.iterations = st.iterations;
  return {rep, sched};
}

// Weak-duality lower bound for general type sets: each single type alone is a
// relaxation, and the single-type infimum equals the cheapest max-reach
// occupancy weighted by the pure deficits (the strictness margin can be made
// arbitrarily small, so it does not enter the bound); the bound is the
// maximum over types.
inline double weak_duality_lower_bound(const MdpModel& m, const TypeSet& types,
                                       const StatePartition& part) {
  double best = 0.0;
  for (int theta = 0; theta < types.num_types(); ++theta) {
    auto phi = cost_of_control(m, types, theta, part, 0.0);
    auto [occ, v] = min_cost_max_reach(m, part, phi);
    (void)occ;
    best = std::max(best, v);
  }
  return best;
}

}  // namespace bmp
