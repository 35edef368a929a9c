#pragma once
// Reachability primitives shared by every solver: maximum reach probabilities
// with a memoryless witness, minimum-cost occupancy measures at maximum reach,
// and exact evaluation of the Markov chain induced by a policy and a payment
// table.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bmp/mdp.hpp"
#include "bmp/simplex.hpp"

namespace bmp {

// One-step probability of entering the target set: r(s,a) = sum over target
// successors of P(s,a,s'), defined on live states (0 elsewhere).
inline std::vector<double> reach_reward(const MdpModel& m, const StatePartition& part) {
  std::vector<double> r(m.sa_total, 0.0);
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k)
      for (const auto& o : m.trans[s][k])
        if (part.in_target[o.to]) r[m.sa_index(s, k)] += o.prob;
  return r;
}

struct ReachResult {
  double rmax = 0.0;                // max reach probability from the initial state
  std::vector<double> p;            // per-state max reach probability
  std::vector<int> witness;         // global action id per state; -1 off the live set
};

struct OccupancyMeasure {
  std::vector<double> x;  // sa-indexed expected residence times (0 off the live set)

  double total(const MdpModel& m, const std::vector<double>& weight) const {
    double v = 0;
    for (int i = 0; i < m.sa_total; ++i) v += x[i] * weight[i];
    return v;
  }
};

namespace detail {

inline void require_certified(const SolveStatus& st, const char* where) {
  if (st.result != SolveResult::Optimal)
    throw std::runtime_error(std::string(where) + ": LP not solved to optimality");
  if (st.gap > 1e-6 * (1.0 + std::fabs(st.objective)))
    throw std::runtime_error(std::string(where) + ": LP duality gap too large");
}

}  // namespace detail

// Max-reach probabilities via the standard LP: minimize sum p(s) subject to
// p(s) >= r(s,a) + sum_{s' live} P(s,a,s') p(s') and p in [0,1] on live
// states. The witness policy is extracted attractor-style: repeatedly pick an
// action that attains p(s) and moves with positive probability into the set of
// states already known to make progress.
inline ReachResult max_reach(const MdpModel& m, const StatePartition& part) {
  const int n = m.num_states();
  ReachResult res;
  res.p.assign(n, 0.0);
  res.witness.assign(n, -1);
  for (int s = 0; s < n; ++s)
    if (part.in_target[s]) res.p[s] = 1.0;

  const auto r = reach_reward(m, part);
  const int nl = part.num_live();
  if (nl > 0) {
    LinearProgram lp;
    for (int i = 0; i < nl; ++i) lp.add_var(0.0, 1.0, 1.0);
    for (int s : part.live_states)
      for (int k = 0; k < m.num_local(s); ++k) {
        std::vector<RowEntry> row;
        row.push_back({part.live_index[s], 1.0});
        double rhs = r[m.sa_index(s, k)];
        for (const auto& o : m.trans[s][k])
          if (part.in_live[o.to]) {
            bool merged = false;
            for (auto& e : row)
              if (e.col == part.live_index[o.to]) {
                e.coef -= o.prob;
                merged = true;
              }
            if (!merged) row.push_back({part.live_index[o.to], -o.prob});
          }
        lp.add_row(row, Rel::GE, rhs);
      }
    auto st = solve_lp(lp);
    detail::require_certified(st, "max_reach");
    for (int s : part.live_states) res.p[s] = st.x[part.live_index[s]];
  }
  res.rmax = res.p[m.initial];

  // attractor extraction over states with positive value
  const double tol = 1e-7;
  std::vector<char> done(n, 0);
  for (int s = 0; s < n; ++s)
    if (!part.in_live[s]) done[s] = 1;
  bool progress = true;
  while (progress) {
    progress = false;
    for (int s : part.live_states) {
      if (done[s]) continue;
      for (int k = 0; k < m.num_local(s); ++k) {
        double q = r[m.sa_index(s, k)];
        bool progresses = false;
        for (const auto& o : m.trans[s][k]) {
          if (part.in_live[o.to]) q += o.prob * res.p[o.to];
          if (o.prob > 1e-12 &&
              (part.in_target[o.to] || (part.in_live[o.to] && done[o.to])))
            progresses = true;
        }
        if (q >= res.p[s] - tol && progresses) {
          res.witness[s] = m.avail[s][k];
          done[s] = 1;
          progress = true;
          break;
        }
      }
    }
  }
  // any live state never attracted (possible only at value ~0) gets an
  // arbitrary value-attaining action
  for (int s : part.live_states)
    if (res.witness[s] < 0) {
      for (int k = 0; k < m.num_local(s); ++k) {
        double q = r[m.sa_index(s, k)];
        for (const auto& o : m.trans[s][k])
          if (part.in_live[o.to]) q += o.prob * res.p[o.to];
        if (q >= res.p[s] - tol) {
          res.witness[s] = m.avail[s][k];
          break;
        }
      }
      if (res.witness[s] < 0) res.witness[s] = m.avail[s][0];
    }
  return res;
}

// Sparse occupancy-measure LP over the live state-action pairs: minimize
// sum x*cost subject to flow balance (unit source at the initial state) and
// sum x*r = rmax. `col` maps sa-indices to LP columns (-1 off the live set).
struct OccupancyLp {
  LinearProgram lp;
  std::vector<int> col;
};

inline OccupancyLp build_occupancy_lp(const MdpModel& m, const StatePartition& part,
                                      const std::vector<double>& cost,
                                      const std::vector<double>& r, double rmax) {
  OccupancyLp out;
  out.col.assign(m.sa_total, -1);
  LinearProgram& lp = out.lp;
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      out.col[i] = lp.add_var(0.0, kInf, cost[i]);
    }
  // flow balance per live state
  for (int s : part.live_states) {
    std::vector<double> coef(lp.num_vars, 0.0);
    for (int k = 0; k < m.num_local(s); ++k) coef[out.col[m.sa_index(s, k)]] += 1.0;
    for (int sp : part.live_states)
      for (int k = 0; k < m.num_local(sp); ++k)
        for (const auto& o : m.trans[sp][k])
          if (o.to == s) coef[out.col[m.sa_index(sp, k)]] -= o.prob;
    std::vector<RowEntry> row;
    for (int j = 0; j < lp.num_vars; ++j)
      if (coef[j] != 0.0) row.push_back({j, coef[j]});
    lp.add_row(row, Rel::EQ, s == m.initial ? 1.0 : 0.0);
  }
  // reach equality
  std::vector<RowEntry> row;
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      if (r[i] > 0.0) row.push_back({out.col[i], r[i]});
    }
  lp.add_row(row, Rel::EQ, rmax);
  return out;
}

// Minimum-cost occupancy at maximum reach. Returns the occupancy and the LP
// value.
inline std::pair<OccupancyMeasure, double> min_cost_max_reach(const MdpModel& m,
                                                              const StatePartition& part,
                                                              const std::vector<double>& cost) {
  auto reach = max_reach(m, part);
  const auto r = reach_reward(m, part);
  OccupancyMeasure occ;
  occ.x.assign(m.sa_total, 0.0);
  if (part.num_live() == 0 || !part.in_live[m.initial]) return {occ, 0.0};

  auto built = build_occupancy_lp(m, part, cost, r, reach.rmax);
  const auto& col = built.col;
  auto st = solve_lp(built.lp);
  detail::require_certified(st, "min_cost_max_reach");
  for (int i = 0; i < m.sa_total; ++i)
    if (col[i] >= 0) occ.x[i] = st.x[col[i]];
  // spurious flow into pairs that can only enter the dead set must vanish
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) {
      bool all_dead = true;
      for (const auto& o : m.trans[s][k])
        if (o.prob > 1e-12 && !part.in_dead[o.to]) all_dead = false;
      if (all_dead && occ.x[m.sa_index(s, k)] > 1e-7)
        throw std::runtime_error("min_cost_max_reach: spurious dead-end flow");
    }
  return {occ, st.objective};
}

// Exact evaluation of the chain induced by a memoryless policy (global action
// id per live state) and a payment table. Returns (reach probability, expected
// total payment). A closed recurrent class inside the live set makes the
// residence times diverge: positive payment anywhere in such a class means the
// cost is +infinity; a zero-payment class is dropped (it contributes nothing
// to either total).
inline std::pair<double, double> evaluate_chain(const MdpModel& m, const StatePartition& part,
                                                const std::vector<int>& policy,
                                                const std::vector<double>& payments) {
  const int n = m.num_states();
  const auto r = reach_reward(m, part);
  // restrict to live states reachable from the initial state under the policy
  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  if (part.in_live[m.initial]) {
    seen[m.initial] = 1;
    stack.push_back(m.initial);
  }
  auto local = [&](int s) {
    const int k = m.local_of(s, policy[s]);
    if (k < 0) throw std::runtime_error("evaluate_chain: policy picks unavailable action");
    return k;
  };
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (const auto& o : m.trans[s][local(s)])
      if (o.prob > 1e-12 && part.in_live[o.to] && !seen[o.to]) {
        seen[o.to] = 1;
        stack.push_back(o.to);
      }
  }
  std::vector<int> states;
  std::vector<int> pos(n, -1);
  for (int s = 0; s < n; ++s)
    if (seen[s]) {
      pos[s] = static_cast<int>(states.size());
      states.push_back(s);
    }
  const int nn = static_cast<int>(states.size());
  if (nn == 0) return {0.0, 0.0};

  // Tarjan SCCs (iterative) on the induced subchain
  std::vector<int> idx(nn, -1), low(nn, 0), comp(nn, -1), sccstack;
  std::vector<char> on(nn, 0);
  int next_index = 0, num_comp = 0;
  for (int root = 0; root < nn; ++root) {
    if (idx[root] >= 0) continue;
    std::vector<std::pair<int, size_t>> call{{root, 0}};
    while (!call.empty()) {
      auto& [v, ei] = call.back();
      if (ei == 0) {
        idx[v] = low[v] = next_index++;
        sccstack.push_back(v);
        on[v] = 1;
      }
      const auto& outs = m.trans[states[v]][local(states[v])];
      bool descended = false;
      while (ei < outs.size()) {
        const auto& o = outs[ei++];
        if (o.prob <= 1e-12 || pos[o.to] < 0) continue;
        const int w = pos[o.to];
        if (idx[w] < 0) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on[w]) low[v] = std::min(low[v], idx[w]);
      }
      if (descended) continue;
      if (ei >= outs.size()) {
        if (low[v] == idx[v]) {
          while (true) {
            const int w = sccstack.back();
            sccstack.pop_back();
            on[w] = 0;
            comp[w] = num_comp;
            if (w == v) break;
          }
          ++num_comp;
        }
        const int vv = v;
        call.pop_back();
        if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[vv]);
      }
    }
  }
  // a component is closed if no positive-probability edge leaves the live set
  // or the component
  std::vector<char> comp_closed(num_comp, 1), comp_paid(num_comp, 0);
  for (int v = 0; v < nn; ++v) {
    const int s = states[v];
    const int k = local(s);
    if (payments[m.sa_index(s, k)] > 1e-12) comp_paid[comp[v]] = 1;
    for (const auto& o : m.trans[s][k]) {
      if (o.prob <= 1e-12) continue;
      if (!part.in_live[o.to] || comp[pos[o.to]] != comp[v]) comp_closed[comp[v]] = 0;
    }
  }
  bool diverges = false;
  std::vector<char> drop(nn, 0);
  for (int v = 0; v < nn; ++v)
    if (comp_closed[comp[v]]) {
      if (comp_paid[comp[v]]) diverges = true;
      drop[v] = 1;
    }

  // transient solve (I - Q^T) x = alpha over the kept states
  std::vector<int> keep;
  std::vector<int> kpos(nn, -1);
  for (int v = 0; v < nn; ++v)
    if (!drop[v]) {
      kpos[v] = static_cast<int>(keep.size());
      keep.push_back(v);
    }
  const int kn = static_cast<int>(keep.size());
  std::vector<double> x;
  if (kn > 0) {
    std::vector<double> A(static_cast<size_t>(kn) * kn, 0.0), b(kn, 0.0);
    for (int i = 0; i < kn; ++i) A[static_cast<size_t>(i) * kn + i] = 1.0;
    if (pos[m.initial] >= 0 && kpos[pos[m.initial]] >= 0) b[kpos[pos[m.initial]]] = 1.0;
    for (int j = 0; j < kn; ++j) {
      const int s = states[keep[j]];
      for (const auto& o : m.trans[s][local(s)]) {
        if (o.prob <= 1e-12 || pos[o.to] < 0 || kpos[pos[o.to]] < 0) continue;
        A[static_cast<size_t>(kpos[pos[o.to]]) * kn + j] -= o.prob;
      }
    }
    // Gaussian elimination with partial pivoting
    x.assign(kn, 0.0);
    std::vector<int> perm(kn);
    for (int i = 0; i < kn; ++i) perm[i] = i;
    for (int c = 0; c < kn; ++c) {
      int piv = c;
      for (int i = c + 1; i < kn; ++i)
        if (std::fabs(A[static_cast<size_t>(i) * kn + c]) >
            std::fabs(A[static_cast<size_t>(piv) * kn + c]))
          piv = i;
      if (std::fabs(A[static_cast<size_t>(piv) * kn + c]) < 1e-12)
        throw std::runtime_error("evaluate_chain: singular transient system");
      if (piv != c) {
        for (int j = 0; j < kn; ++j)
          std::swap(A[static_cast<size_t>(piv) * kn + j], A[static_cast<size_t>(c) * kn + j]);
        std::swap(b[piv], b[c]);
      }
      const double d = A[static_cast<size_t>(c) * kn + c];
      for (int i = c + 1; i < kn; ++i) {
        const double f = A[static_cast<size_t>(i) * kn + c] / d;
        if (f == 0.0) continue;
        for (int j = c; j < kn; ++j)
          A[static_cast<size_t>(i) * kn + j] -= f * A[static_cast<size_t>(c) * kn + j];
        b[i] -= f * b[c];
      }
    }
    for (int c = kn - 1; c >= 0; --c) {
      double v = b[c];
      for (int j = c + 1; j < kn; ++j) v -= A[static_cast<size_t>(c) * kn + j] * x[j];
      x[c] = v / A[static_cast<size_t>(c) * kn + c];
    }
  }
  double reach = part.in_target[m.initial] ? 1.0 : 0.0;
  double costv = 0.0;
  for (int i = 0; i < kn; ++i) {
    const int s = states[keep[i]];
    const int sa = m.sa_index(s, local(s));
    reach += x[i] * r[sa];
    costv += x[i] * payments[sa];
  }
  if (diverges) costv = kInf;
  return {reach, costv};
}

}  // namespace bmp
