#pragma once
// Exact MILP for the stationary incentive-design problem with unknown agent
// type, plus the single-offer-per-state extension. Variables per type: agent
// action values Q/V with indicator binaries X, occupancy variables lambda
// with McCormick products mu carrying the max-reach requirement, and
// principal payment values Qp/Vp feeding the worst-case objective omega.
//
// The flow-balance rows weight incoming occupancy by the transition
// probabilities; mass balance is ill-posed otherwise.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bmp/agent_sim.hpp"
#include "bmp/bmpd.hpp"
#include "bmp/branch_bound.hpp"
#include "bmp/mdp.hpp"
#include "bmp/reachability.hpp"
#include "bmp/report.hpp"
#include "bmp/schedule.hpp"

namespace bmp {

struct BigMConstants {
  double m_eps = 0.0;    // deactivates the value-selection rows
  double m_tilde = 0.0;  // occupancy bound for the McCormick envelope
  double m_bar = 0.0;    // bound on the principal's cost-to-go from any state
  std::vector<double> m_bar_state;  // per-state cost-to-go bound (by state id)
  std::vector<double> gamma_cap;    // valid per-pair offer upper bounds
};

// Upper bounds on the offers some optimal schedule uses. Given the
// selections, the minimal offers solve a max-plus system over each state's
// dominance chain: a type selecting (s,a) needs an edge over the runner-up,
// which may itself carry an offer placed for another type. Walking that chain
// from (s,a), the first leg costs at most the pair's own worst deficit plus
// the margin, and each later leg belongs to a distinct type and costs at most
// that type's reward span at s plus the margin. With one offer per state the
// chain has a single leg.
inline std::vector<double> offer_caps(const MdpModel& m, const TypeSet& types,
                                      const StatePartition& part, double eps_bar,
                                      bool single_offer) {
  auto caps = conservative_cost(m, types, part, eps_bar);
  const int nt = types.num_types();
  if (!single_offer && nt > 1)
    for (int s : part.live_states) {
      double span = 0.0;
      for (int theta = 0; theta < nt; ++theta) {
        double hi = -kInf, lo = kInf;
        for (int k = 0; k < m.num_local(s); ++k) {
          hi = std::max(hi, types.reward[theta][m.sa_index(s, k)]);
          lo = std::min(lo, types.reward[theta][m.sa_index(s, k)]);
        }
        span = std::max(span, hi - lo);
      }
      for (int k = 0; k < m.num_local(s); ++k)
        caps[m.sa_index(s, k)] += (nt - 1) * (span + eps_bar);
    }
  return caps;
}

inline bool all_deterministic(const MdpModel& m) {
  for (int s = 0; s < m.num_states(); ++s)
    for (int k = 0; k < m.num_local(s); ++k)
      if (m.trans[s][k].size() != 1 || std::fabs(m.trans[s][k][0].prob - 1.0) > 1e-12)
        return false;
  return true;
}

namespace detail {

// True when the live transition graph has no cycle other than self-loops, so
// every run visits each live state at most once.
inline bool live_graph_acyclic(const MdpModel& m, const StatePartition& part) {
  const int n = part.num_live();
  std::vector<int> mark(n, 0);  // 0 unseen, 1 on stack, 2 done
  std::vector<std::pair<int, int>> stack;
  for (int root = 0; root < n; ++root) {
    if (mark[root]) continue;
    stack.push_back({root, 0});
    mark[root] = 1;
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      const int s = part.live_states[v];
      // flatten the successor scan over (action, outcome) pairs
      int seen = 0, next = -1;
      for (int k = 0; k < m.num_local(s) && next < 0; ++k)
        for (const auto& o : m.trans[s][k]) {
          if (o.prob <= kRowSumTol || o.to == s || !part.in_live[o.to]) continue;
          if (seen++ == pos) next = part.live_index[o.to];
        }
      if (next < 0) {
        mark[v] = 2;
        stack.pop_back();
        continue;
      }
      ++pos;
      if (mark[next] == 1) return false;
      if (mark[next] == 0) {
        mark[next] = 1;
        stack.push_back({next, 0});
      }
    }
  }
  return true;
}

}  // namespace detail

inline BigMConstants compute_big_m(const MdpModel& m, const TypeSet& types,
                                   const StatePartition& part, double eps_bar,
                                   double k_tilde = 100.0, bool single_offer = false) {
  BigMConstants bm;
  bm.gamma_cap = offer_caps(m, types, part, eps_bar, single_offer);
  double rmax_v = -kInf, rmin_v = kInf;
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k)
      for (int theta = 0; theta < types.num_types(); ++theta) {
        rmax_v = std::max(rmax_v, types.reward[theta][m.sa_index(s, k)]);
        rmin_v = std::min(rmin_v, types.reward[theta][m.sa_index(s, k)]);
      }
  if (part.num_live() == 0) rmax_v = rmin_v = 0.0;
  // the selection rows need q(s,a') - q(s,a) + eps <= M with q = R + gamma
  // and gamma below its cap
  bm.m_eps = 2.0 * (rmax_v - rmin_v + eps_bar);
  for (int s : part.live_states) {
    double cap_mx = 0.0, span = 0.0;
    for (int k = 0; k < m.num_local(s); ++k)
      cap_mx = std::max(cap_mx, bm.gamma_cap[m.sa_index(s, k)]);
    for (int theta = 0; theta < types.num_types(); ++theta) {
      double hi = -kInf, lo = kInf;
      for (int k = 0; k < m.num_local(s); ++k) {
        hi = std::max(hi, types.reward[theta][m.sa_index(s, k)]);
        lo = std::min(lo, types.reward[theta][m.sa_index(s, k)]);
      }
      span = std::max(span, hi - lo);
    }
    bm.m_eps = std::max(bm.m_eps, span + cap_mx + eps_bar);
  }
  bm.m_tilde = all_deterministic(m) ? 1.0 : k_tilde * m.num_states();
  // Payment bound: some optimal schedule stays below the offer caps, and
  // along a run each paid state is visited at most once when the live graph
  // is deterministic or acyclic apart from self-loops (cycles the agent
  // follows must carry zero offers); otherwise fall back to the same
  // per-state visit heuristic that m_tilde uses. The cost-to-go from a state
  // is then at most the summed cap maxima of the live states reachable from
  // it, times the visit factor.
  const double factor =
      (all_deterministic(m) || detail::live_graph_acyclic(m, part)) ? 1.0 : k_tilde;
  bm.m_bar_state.assign(m.num_states(), eps_bar);
  bm.m_bar = eps_bar;
  for (int s : part.live_states) {
    // forward closure of s inside the live set
    std::vector<char> seen(m.num_states(), 0);
    std::vector<int> queue = {s};
    seen[s] = 1;
    for (size_t h = 0; h < queue.size(); ++h)
      for (int k = 0; k < m.num_local(queue[h]); ++k)
        for (const auto& o : m.trans[queue[h]][k])
          if (o.prob > kRowSumTol && part.in_live[o.to] && !seen[o.to]) {
            seen[o.to] = 1;
            queue.push_back(o.to);
          }
    double sum = 0.0;
    for (int sp : queue) {
      double mx = 0.0;
      for (int k = 0; k < m.num_local(sp); ++k)
        mx = std::max(mx, bm.gamma_cap[m.sa_index(sp, k)]);
      sum += mx;
    }
    bm.m_bar_state[s] = std::max(sum * factor, eps_bar);
    bm.m_bar = std::max(bm.m_bar, bm.m_bar_state[s]);
  }
  return bm;
}

struct MilpArtifacts {
  int omega = -1;
  std::vector<int> gamma;                    // sa -> column (-1 off the live set)
  std::vector<std::vector<int>> q, x, lam, mu, qp;  // [type][sa] -> column
  std::vector<std::vector<int>> v, vp;              // [type][state] -> column
  std::vector<int> xbar, z;                  // single-offer mode only
  BigMConstants bigm;
  double rmax = 0.0;
  double eps_bar = 0.0;
  bool single_offer = false;
  int num_continuous = 0;
  int num_binary = 0;
};

inline std::pair<MixedIntegerProgram, MilpArtifacts> build_nbmp_milp(const MdpModel& m,
                                                                     const TypeSet& types,
                                                                     const StatePartition& part,
                                                                     double eps_bar,
                                                                     double k_tilde = 100.0,
                                                                     bool single_offer_mode = false) {
  const int nt = types.num_types();
  MixedIntegerProgram mip;
  LinearProgram& lp = mip.lp;
  MilpArtifacts art;
  art.eps_bar = eps_bar;
  art.bigm = compute_big_m(m, types, part, eps_bar, k_tilde, single_offer_mode);
  art.rmax = max_reach(m, part).rmax;
  const auto r = reach_reward(m, part);
  const double Mt = art.bigm.m_tilde;

  art.omega = lp.add_var(0.0, kInf, 1.0);
  art.gamma.assign(m.sa_total, -1);
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      // a valid cap on the offers of some optimal schedule
      art.gamma[i] = lp.add_var(0.0, art.bigm.gamma_cap[i], 0.0);
    }

  const std::vector<int> sa_init(m.sa_total, -1), st_init(m.num_states(), -1);
  art.q.assign(nt, sa_init);
  art.x.assign(nt, sa_init);
  art.lam.assign(nt, sa_init);
  art.mu.assign(nt, sa_init);
  art.qp.assign(nt, sa_init);
  art.v.assign(nt, st_init);
  art.vp.assign(nt, st_init);

  for (int t = 0; t < nt; ++t)
    for (int s : part.live_states) {
      art.v[t][s] = lp.add_var(-kInf, kInf, 0.0);
      // canonical optimal payments are nonnegative, so 0 is a valid bound
      art.vp[t][s] = lp.add_var(0.0, kInf, 0.0);
      for (int k = 0; k < m.num_local(s); ++k) {
        const int i = m.sa_index(s, k);
        art.q[t][i] = lp.add_var(-kInf, kInf, 0.0);
        art.lam[t][i] = lp.add_var(0.0, kInf, 0.0);
        art.mu[t][i] = lp.add_var(0.0, kInf, 0.0);
        art.qp[t][i] = lp.add_var(-kInf, kInf, 0.0);
        art.x[t][i] = lp.add_var(0.0, 1.0, 0.0);
        mip.binaries.push_back(art.x[t][i]);
      }
      // mutual eps-dominance makes two selections at one state infeasible,
      // so each per-state selection block is a valid branching group
      std::vector<int> group;
      for (int k = 0; k < m.num_local(s); ++k) group.push_back(art.x[t][m.sa_index(s, k)]);
      mip.sos1_groups.push_back(std::move(group));
    }

  for (int t = 0; t < nt; ++t) {
    for (int s : part.live_states) {
      // q ranges inside the offer caps: R + gamma with gamma in [0, cap]
      double q_hi_state = -kInf;
      for (int k = 0; k < m.num_local(s); ++k) {
        const int i = m.sa_index(s, k);
        q_hi_state = std::max(q_hi_state, types.reward[t][i] + art.bigm.gamma_cap[i]);
      }
      for (int k = 0; k < m.num_local(s); ++k) {
        const int i = m.sa_index(s, k);
        const double q_lo = types.reward[t][i];
        // Q = R + gamma
        lp.add_row({{art.q[t][i], 1.0}, {art.gamma[i], -1.0}}, Rel::EQ, types.reward[t][i]);
        // V >= Q
        lp.add_row({{art.v[t][s], 1.0}, {art.q[t][i], -1.0}}, Rel::GE, 0.0);
        // V <= Q + (1 - X) M, M derived from the q ranges of this state
        {
          const double Msel = std::max(eps_bar, q_hi_state - q_lo);
          lp.add_row({{art.v[t][s], 1.0}, {art.q[t][i], -1.0}, {art.x[t][i], Msel}}, Rel::LE,
                     Msel);
        }
        // strict-margin selection: Q(s,a) + (1-X)M >= Q(s,a') + eps, with M
        // just covering the competitor's best q against this pair's worst
        for (int k2 = 0; k2 < m.num_local(s); ++k2) {
          if (k2 == k) continue;
          const int i2 = m.sa_index(s, k2);
          const double Mm = std::max(
              eps_bar, types.reward[t][i2] + art.bigm.gamma_cap[i2] - q_lo + eps_bar);
          lp.add_row({{art.q[t][i], 1.0}, {art.q[t][i2], -1.0}, {art.x[t][i], -Mm}}, Rel::GE,
                     eps_bar - Mm);
        }
        // McCormick envelope of mu = lambda * X
        lp.add_row({{art.mu[t][i], 1.0}, {art.x[t][i], -Mt}}, Rel::LE, 0.0);
        lp.add_row({{art.mu[t][i], 1.0}, {art.lam[t][i], -1.0}}, Rel::LE, 0.0);
        lp.add_row({{art.mu[t][i], 1.0}, {art.lam[t][i], -1.0}, {art.x[t][i], -Mt}}, Rel::GE,
                   -Mt);
        // Qp = gamma + sum P Vp
        {
          std::vector<double> coef(lp.num_vars, 0.0);
          coef[art.qp[t][i]] = 1.0;
          coef[art.gamma[i]] -= 1.0;
          for (const auto& o : m.trans[s][k])
            if (part.in_live[o.to]) coef[art.vp[t][o.to]] -= o.prob;
          std::vector<RowEntry> row;
          for (int j = 0; j < lp.num_vars; ++j)
            if (coef[j] != 0.0) row.push_back({j, coef[j]});
          lp.add_row(row, Rel::EQ, 0.0);
        }
        // Vp pinned to Qp on the selected action. Downward deactivation only
        // needs to cover this pair's own cost ceiling (its offer cap plus the
        // successors' cost-to-go bounds); upward deactivation covers the
        // state's cost-to-go bound.
        {
          double qp_hi = art.bigm.gamma_cap[i];
          for (const auto& o : m.trans[s][k])
            if (part.in_live[o.to]) qp_hi += o.prob * art.bigm.m_bar_state[o.to];
          const double Mb = art.bigm.m_bar_state[s];
          lp.add_row({{art.vp[t][s], 1.0}, {art.qp[t][i], -1.0}, {art.x[t][i], -qp_hi}},
                     Rel::GE, -qp_hi);
          lp.add_row({{art.vp[t][s], 1.0}, {art.qp[t][i], -1.0}, {art.x[t][i], Mb}}, Rel::LE,
                     Mb);
        }
      }
      // tightening (implied at integral points, cuts fractional ones): the
      // selected offer alone costs v - R(s, selected) >= v - max_k R(s,k),
      // and downstream payments are nonnegative
      {
        double rmx = -kInf;
        for (int k = 0; k < m.num_local(s); ++k)
          rmx = std::max(rmx, types.reward[t][m.sa_index(s, k)]);
        lp.add_row({{art.vp[t][s], 1.0}, {art.v[t][s], -1.0}}, Rel::GE, -rmx);
      }
      // flow balance with the occupancy products
      {
        std::vector<double> coef(lp.num_vars, 0.0);
        for (int k = 0; k < m.num_local(s); ++k) coef[art.mu[t][m.sa_index(s, k)]] += 1.0;
        for (int sp : part.live_states)
          for (int k = 0; k < m.num_local(sp); ++k)
            for (const auto& o : m.trans[sp][k])
              if (o.to == s) coef[art.mu[t][m.sa_index(sp, k)]] -= o.prob;
        std::vector<RowEntry> row;
        for (int j = 0; j < lp.num_vars; ++j)
          if (coef[j] != 0.0) row.push_back({j, coef[j]});
        lp.add_row(row, Rel::EQ, s == m.initial ? 1.0 : 0.0);
      }
      // at least one selected action
      {
        std::vector<RowEntry> row;
        for (int k = 0; k < m.num_local(s); ++k) row.push_back({art.x[t][m.sa_index(s, k)], 1.0});
        lp.add_row(row, Rel::GE, 1.0);
      }
    }
    // the selected policy's occupancy meets the reach requirement; the row is
    // on the products mu (flow-balanced and supported on selected actions) --
    // putting it on the raw lambda would let unselected entries fake it
    {
      std::vector<RowEntry> row;
      for (int s : part.live_states)
        for (int k = 0; k < m.num_local(s); ++k) {
          const int i = m.sa_index(s, k);
          if (r[i] > 0.0) row.push_back({art.mu[t][i], r[i]});
        }
      lp.add_row(row, Rel::EQ, art.rmax);
    }
    // flow-priced payment floor (implied at integral points, cuts fractional
    // ones): a selected pair's offer must beat the competitors' zero-offer
    // values by the margin, and the expected payment weights those floors by
    // the visit flow mu
    if (part.in_live[m.initial]) {
      std::vector<RowEntry> row = {{art.vp[t][m.initial], 1.0}};
      for (int s : part.live_states)
        for (int k = 0; k < m.num_local(s); ++k) {
          const int i = m.sa_index(s, k);
          double other = -kInf;
          for (int k2 = 0; k2 < m.num_local(s); ++k2)
            if (k2 != k) other = std::max(other, types.reward[t][m.sa_index(s, k2)]);
          const double floor =
              other > -kInf ? std::max(0.0, other - types.reward[t][i] + eps_bar) : 0.0;
          if (floor > 0.0) row.push_back({art.mu[t][i], -floor});
        }
      if (row.size() > 1) lp.add_row(row, Rel::GE, 0.0);
    }
    // worst case objective
    if (part.in_live[m.initial])
      lp.add_row({{art.omega, 1.0}, {art.vp[t][m.initial], -1.0}}, Rel::GE, 0.0);
  }

  art.num_binary = static_cast<int>(mip.binaries.size());
  art.num_continuous = lp.num_vars - art.num_binary;
  return {std::move(mip), std::move(art)};
}

// Single-offer extension: binaries Xbar pick the one incentivized action per
// state, and McCormick products z = Xbar * gamma force all offer mass onto
// it, using the offer caps the base model already carries.
inline std::pair<MixedIntegerProgram, MilpArtifacts> extend_ns_bmp(
    const MixedIntegerProgram& base, const MilpArtifacts& base_art, const MdpModel& m,
    const StatePartition& part) {
  MixedIntegerProgram mip = base;
  MilpArtifacts art = base_art;
  LinearProgram& lp = mip.lp;
  art.single_offer = true;
  art.xbar.assign(m.sa_total, -1);
  art.z.assign(m.sa_total, -1);
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      art.z[i] = lp.add_var(0.0, kInf, 0.0);
      art.xbar[i] = lp.add_var(0.0, 1.0, 0.0);
      mip.binaries.push_back(art.xbar[i]);
    }
  for (int s : part.live_states) {
    std::vector<RowEntry> pick, mass;
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      // McCormick envelope of z = Xbar * gamma with gamma in [0, cap]
      const double cb = lp.up[art.gamma[i]];
      lp.add_row({{art.z[i], 1.0}, {art.xbar[i], -cb}}, Rel::LE, 0.0);
      lp.add_row({{art.z[i], 1.0}, {art.gamma[i], -1.0}}, Rel::LE, 0.0);
      lp.add_row({{art.z[i], 1.0}, {art.gamma[i], -1.0}, {art.xbar[i], -cb}}, Rel::GE, -cb);
      pick.push_back({art.xbar[i], 1.0});
      mass.push_back({art.z[i], 1.0});
      mass.push_back({art.gamma[i], -1.0});
    }
    lp.add_row(pick, Rel::EQ, 1.0);
    lp.add_row(mass, Rel::EQ, 0.0);
    // the offer-placement groups drive everything else, so put them ahead of
    // the per-type selection groups in branching order
    std::vector<int> group;
    for (int k = 0; k < m.num_local(s); ++k) group.push_back(art.xbar[m.sa_index(s, k)]);
    mip.sos1_groups.insert(mip.sos1_groups.begin(), std::move(group));
  }
  art.num_binary = static_cast<int>(mip.binaries.size());
  art.num_continuous = lp.num_vars - art.num_binary;
  return {std::move(mip), std::move(art)};
}

namespace detail {

inline IncentiveSchedule extract_schedule(const MdpModel& m, const StatePartition& part,
                                          const MilpArtifacts& art, const std::vector<double>& x,
                                          bool single_offer) {
  IncentiveSchedule sched = IncentiveSchedule::zero(m);
  sched.epsilon = art.eps_bar;
  sched.single_action = single_offer;
  for (int s : part.live_states) {
    int kept = -1;
    double best = 0.0;
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      double g = std::max(0.0, x[art.gamma[i]]);
      if (g < 1e-9) g = 0.0;
      sched.offers[i] = g;
      if (g > best) {
        best = g;
        kept = k;
      }
    }
    if (single_offer && kept >= 0)
      for (int k = 0; k < m.num_local(s); ++k)
        if (k != kept) sched.offers[m.sa_index(s, k)] = 0.0;
  }
  return sched;
}

// Rounding repair: read each type's selection indicator at a (possibly
// fractional) relaxation point, then recompute the cheapest offers that make
// every rounded selection strictly preferred by its type — one tiny LP per
// live state. This turns near-integral node relaxations into feasible
// schedules even when their offer columns are fractional averages.
inline IncentiveSchedule round_and_repair(const MdpModel& m, const TypeSet& types,
                                          const StatePartition& part, const MilpArtifacts& art,
                                          const std::vector<double>& pt, bool single_offer) {
  const int nt = types.num_types();
  IncentiveSchedule sched = IncentiveSchedule::zero(m);
  sched.epsilon = art.eps_bar;
  sched.single_action = single_offer;
  for (int s : part.live_states) {
    const int nl = m.num_local(s);
    if (nl == 1) continue;
    // A type's intended action is where its visit flow goes; the selection
    // indicators are loose in a relaxation (several can sit at 1), so they
    // are not a usable signal. Types without flow through this state adopt a
    // flowing type's choice, and when nobody visits, the state gets the
    // action whose shared strict margin is cheapest (its offer is never paid
    // anyway).
    std::vector<int> sel(nt, -1);
    std::vector<char> offered(nl, 0);
    auto cheapest_shared = [&]() {
      int best = 0;
      double bw = kInf;
      for (int k = 0; k < nl; ++k) {
        double need = 0.0;
        for (int t = 0; t < nt; ++t)
          for (int k2 = 0; k2 < nl; ++k2)
            if (k2 != k)
              need = std::max(need, types.reward[t][m.sa_index(s, k2)] -
                                        types.reward[t][m.sa_index(s, k)] + art.eps_bar);
        if (need < bw) {
          bw = need;
          best = k;
        }
      }
      return best;
    };
    int lead = -1;  // selection of the type with the most flow here
    double lead_flow = 1e-6;
    for (int t = 0; t < nt; ++t) {
      double flow = 0.0;
      int best = -1;
      double bw = 1e-9;
      for (int k = 0; k < nl; ++k) {
        const double w = pt[art.mu[t][m.sa_index(s, k)]];
        flow += w;
        if (w > bw) {
          bw = w;
          best = k;
        }
      }
      if (flow > 1e-6 && best >= 0) {
        sel[t] = best;
        if (flow > lead_flow) {
          lead_flow = flow;
          lead = best;
        }
      }
    }
    if (single_offer) {
      // one shared action: the flow leader, or the cheapest shared margin
      const int pick = lead >= 0 ? lead : cheapest_shared();
      sel.assign(nt, pick);
      offered[pick] = 1;
    } else {
      const int fallback = lead >= 0 ? lead : cheapest_shared();
      for (int t = 0; t < nt; ++t) {
        if (sel[t] < 0) sel[t] = fallback;
        offered[sel[t]] = 1;
      }
    }
    LinearProgram lp;
    std::vector<int> var(nl, -1);
    for (int k = 0; k < nl; ++k)
      if (offered[k]) var[k] = lp.add_var(0.0, kInf, 1.0);
    for (int t = 0; t < nt; ++t)
      for (int k = 0; k < nl; ++k) {
        if (k == sel[t]) continue;
        const double rhs = types.reward[t][m.sa_index(s, k)] -
                           types.reward[t][m.sa_index(s, sel[t])] + art.eps_bar;
        std::vector<RowEntry> row = {{var[sel[t]], 1.0}};
        if (var[k] >= 0) row.push_back({var[k], -1.0});
        lp.add_row(row, Rel::GE, rhs);
      }
    auto st = solve_lp(lp);
    if (st.result != SolveResult::Optimal) return IncentiveSchedule::zero(m);
    for (int k = 0; k < nl; ++k)
      if (var[k] >= 0) {
        double g = std::max(0.0, st.x[var[k]]);
        if (g < 1e-9) g = 0.0;
        sched.offers[m.sa_index(s, k)] = g;
      }
  }
  return sched;
}

// A schedule corresponds to a feasible MILP point only when every type's best
// response is unique with the full strict-preference margin.
inline bool strict_margins_hold(const MdpModel& m, const TypeSet& types,
                                const StatePartition& part, const IncentiveSchedule& sched,
                                double eps_bar) {
  for (int t = 0; t < types.num_types(); ++t)
    for (int s : part.live_states) {
      double top = -kInf, second = -kInf;
      for (int k = 0; k < m.num_local(s); ++k) {
        const double v = types.reward[t][m.sa_index(s, k)] + sched.offers[m.sa_index(s, k)];
        if (v > top) {
          second = top;
          top = v;
        } else if (v > second) {
          second = v;
        }
      }
      if (m.num_local(s) > 1 && top - second < eps_bar - 1e-9) return false;
    }
  return true;
}

inline std::pair<SolveReport, IncentiveSchedule> solve_bmp_milp(const MdpModel& m,
                                                               const TypeSet& types,
                                                               const StatePartition& part,
                                                               double eps_bar, bool single_offer,
                                                               MilpOptions opt) {
  SolveReport rep;
  rep.method = single_offer ? "nsbmp-milp" : "nbmp-milp";
  rep.epsilon = eps_bar;

  if (part.num_live() == 0 || !part.in_live[m.initial]) {
    IncentiveSchedule sched = IncentiveSchedule::zero(m);
    sched.epsilon = eps_bar;
    sched.single_action = single_offer;
    auto ver = verify_schedule(m, types, part, sched);
    rep.fill_from(ver);
    rep.proven_optimal = true;
    return {rep, sched};
  }

  auto [mip0, art0] = build_nbmp_milp(m, types, part, eps_bar, 100.0, single_offer);
  MixedIntegerProgram mip = std::move(mip0);
  MilpArtifacts art = std::move(art0);
  if (single_offer) {
    auto ext = extend_ns_bmp(mip, art, m, part);
    mip = std::move(ext.first);
    art = std::move(ext.second);
  }

  // seed: the conservative schedule is feasible in both modes
  {
    auto [bsched, bcost] = conservative_baseline(m, types, part, eps_bar);
    std::vector<double> seed(mip.lp.num_vars, 0.0);
    seed[art.omega] = bcost;
    for (int i = 0; i < m.sa_total; ++i)
      if (art.gamma[i] >= 0) seed[art.gamma[i]] = bsched.offers[i];
    opt.seed_incumbent = {bcost, std::move(seed)};
  }
  // rounding heuristic: replay the node's offers through the simulator
  long calls = 0;
  opt.heuristic = [&](const std::vector<double>& x)
      -> std::optional<std::pair<double, std::vector<double>>> {
    if (calls++ % 25 != 0) return std::nullopt;
    auto sched = round_and_repair(m, types, part, art, x, single_offer);
    if (!strict_margins_hold(m, types, part, sched, eps_bar)) {
      sched = extract_schedule(m, part, art, x, single_offer);
      if (!strict_margins_hold(m, types, part, sched, eps_bar)) return std::nullopt;
    }
    auto ver = verify_schedule(m, types, part, sched);
    if (!ver.feasible || ver.worst_case_cost == kInf) return std::nullopt;
    std::vector<double> pt = x;
    pt[art.omega] = ver.worst_case_cost;
    for (int i = 0; i < m.sa_total; ++i)
      if (art.gamma[i] >= 0) pt[art.gamma[i]] = sched.offers[i];
    return std::make_pair(ver.worst_case_cost, std::move(pt));
  };

  auto st = solve_milp(mip, opt);
  rep.iterations = st.iterations;
  if (st.result != SolveResult::Optimal && !st.has_incumbent)
    throw std::runtime_error("solve_bmp_milp: no feasible incumbent");
  rep.proven_optimal = st.result == SolveResult::Optimal;
  if (!rep.proven_optimal) rep.diagnostics = "node limit reached; incumbent returned";

  auto sched = extract_schedule(m, part, art, st.x, single_offer);
  auto ver = verify_schedule(m, types, part, sched);
  rep.fill_from(ver);
  if (!ver.feasible)
    throw std::runtime_error("solve_bmp_milp: extracted schedule failed verification");
  if (std::fabs(ver.worst_case_cost - st.objective) > 1e-5 * (1.0 + std::fabs(st.objective)))
    rep.diagnostics += "verified cost deviates from the MILP objective";
  rep.lower_bound = weak_duality_lower_bound(m, types, part);
  return {rep, sched};
}

}  // namespace detail

inline std::pair<SolveReport, IncentiveSchedule> solve_nbmp(const MdpModel& m,
                                                            const TypeSet& types,
                                                            const StatePartition& part,
                                                            double eps_bar,
                                                            const MilpOptions& opt = {}) {
  return detail::solve_bmp_milp(m, types, part, eps_bar, false, opt);
}

inline std::pair<SolveReport, IncentiveSchedule> solve_nsbmp(const MdpModel& m,
                                                             const TypeSet& types,
                                                             const StatePartition& part,
                                                             double eps_bar,
                                                             const MilpOptions& opt = {}) {
  return detail::solve_bmp_milp(m, types, part, eps_bar, true, opt);
}

}  // namespace bmp
