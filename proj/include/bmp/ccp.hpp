#pragma once
// Bilinear NLP formulation of the stationary incentive-design problem and a
// penalty convex-concave procedure (P-CCP) that computes locally optimal
// schedules. Selections are continuous policy variables nu in the simplex
// instead of binaries; the selection logic, the occupancy products and the
// payment pinning become bilinear rows. Each bilinear row is DC-split as
// x*y = 1/4[(x+y)^2 - (x-y)^2], the concave half is linearized at the
// incumbent, and the resulting convex-QC subproblems (with penalized slacks
// on the split rows) are solved by the Kelley engine.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bmp/agent_sim.hpp"
#include "bmp/bmpd.hpp"
#include "bmp/cutting_plane.hpp"
#include "bmp/mdp.hpp"
#include "bmp/milp_builder.hpp"
#include "bmp/reachability.hpp"
#include "bmp/report.hpp"
#include "bmp/schedule.hpp"

namespace bmp {

// One bilinear inequality, normalized to lin^T x + sum_k w_k * x_k * y_k <= 0.
struct BilinearTerm {
  int x = 0, y = 0;
  double w = 0.0;
};
struct BilinearRow {
  std::vector<RowEntry> lin;
  std::vector<BilinearTerm> bil;

  double value(const std::vector<double>& pt) const {
    double v = 0.0;
    for (const auto& e : lin) v += e.coef * pt[e.col];
    for (const auto& t : bil) v += t.w * pt[t.x] * pt[t.y];
    return v;
  }
};

struct NlpArtifacts {
  int omega = -1;
  std::vector<int> gamma;                           // sa -> column (-1 off live)
  std::vector<std::vector<int>> q, lam, mu, qp, nu;  // [type][sa] -> column
  std::vector<std::vector<int>> v, vp;               // [type][state] -> column
  std::vector<int> nubar;                            // sa -> column, NS mode only
  double rmax = 0.0;
  double eps_bar = 0.0;
  bool single_offer = false;
};

struct BilinearProgram {
  LinearProgram lp;                   // linear rows, bounds, objective (omega)
  std::vector<BilinearRow> bilinear;  // rows normalized to "<= 0"
  NlpArtifacts art;
  // kept for schedule extraction and verification inside pccp_solve
  MdpModel model;
  TypeSet types;
  StatePartition part;
};

inline BilinearProgram build_nbmp_nlp(const MdpModel& m, const TypeSet& types,
                                      const StatePartition& part, double eps_bar,
                                      bool single_action, double k_tilde = 100.0) {
  if (eps_bar <= 0.0) throw std::invalid_argument("build_nbmp_nlp: eps_bar must be positive");
  BilinearProgram bp;
  bp.model = m;
  bp.types = types;
  bp.part = part;
  LinearProgram& lp = bp.lp;
  NlpArtifacts& art = bp.art;
  art.eps_bar = eps_bar;
  art.single_offer = single_action;
  art.rmax = max_reach(m, part).rmax;
  const auto r = reach_reward(m, part);
  const auto caps = offer_caps(m, types, part, eps_bar, single_action);
  const double m_tilde = all_deterministic(m) ? 1.0 : k_tilde * m.num_states();
  const int nt = types.num_types();

  art.omega = lp.add_var(0.0, kInf, 1.0);
  art.gamma.assign(m.sa_total, -1);
  art.nubar.assign(m.sa_total, -1);
  for (int s : part.live_states)
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      art.gamma[i] = lp.add_var(0.0, caps[i], 0.0);
    }

  const std::vector<int> sa_init(m.sa_total, -1), st_init(m.num_states(), -1);
  art.q.assign(nt, sa_init);
  art.lam.assign(nt, sa_init);
  art.mu.assign(nt, sa_init);
  art.qp.assign(nt, sa_init);
  art.nu.assign(nt, sa_init);
  art.v.assign(nt, st_init);
  art.vp.assign(nt, st_init);
  for (int t = 0; t < nt; ++t)
    for (int s : part.live_states) {
      art.v[t][s] = lp.add_var(-kInf, kInf, 0.0);
      // canonical optimal payments are nonnegative; no upper bound
      art.vp[t][s] = lp.add_var(0.0, kInf, 0.0);
      for (int k = 0; k < m.num_local(s); ++k) {
        const int i = m.sa_index(s, k);
        // bounds implied by the hard rows Q = R + gamma and Qp = gamma +
        // sum P Vp with gamma, Vp >= 0; declaring them keeps the cutting-
        // plane subproblems well-conditioned (no artificial boxes needed
        // below, and no variable parked at a huge artificial bound)
        art.q[t][i] = lp.add_var(types.reward[t][i], types.reward[t][i] + caps[i], 0.0);
        art.lam[t][i] = lp.add_var(0.0, m_tilde, 0.0);
        art.mu[t][i] = lp.add_var(0.0, m_tilde, 0.0);
        art.qp[t][i] = lp.add_var(0.0, kInf, 0.0);
        art.nu[t][i] = lp.add_var(0.0, 1.0, 0.0);
      }
    }
  if (single_action)
    for (int s : part.live_states)
      for (int k = 0; k < m.num_local(s); ++k)
        art.nubar[m.sa_index(s, k)] = lp.add_var(0.0, 1.0, 0.0);

  for (int t = 0; t < nt; ++t) {
    for (int s : part.live_states) {
      for (int k = 0; k < m.num_local(s); ++k) {
        const int i = m.sa_index(s, k);
        // Q = R + gamma
        lp.add_row({{art.q[t][i], 1.0}, {art.gamma[i], -1.0}}, Rel::EQ, types.reward[t][i]);
        // V >= Q
        lp.add_row({{art.v[t][s], 1.0}, {art.q[t][i], -1.0}}, Rel::GE, 0.0);
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
        // strict-margin selection: nu(s,a) (Q(s,a') + eps - Q(s,a)) <= 0
        for (int k2 = 0; k2 < m.num_local(s); ++k2) {
          if (k2 == k) continue;
          const int i2 = m.sa_index(s, k2);
          BilinearRow row;
          row.lin = {{art.nu[t][i], eps_bar}};
          row.bil = {{art.nu[t][i], art.q[t][i2], 1.0}, {art.nu[t][i], art.q[t][i], -1.0}};
          bp.bilinear.push_back(std::move(row));
        }
        // mu = lambda * nu, as two inequalities
        {
          BilinearRow le;  // mu - lambda nu <= 0
          le.lin = {{art.mu[t][i], 1.0}};
          le.bil = {{art.lam[t][i], art.nu[t][i], -1.0}};
          bp.bilinear.push_back(std::move(le));
          BilinearRow ge;  // lambda nu - mu <= 0
          ge.lin = {{art.mu[t][i], -1.0}};
          ge.bil = {{art.lam[t][i], art.nu[t][i], 1.0}};
          bp.bilinear.push_back(std::move(ge));
        }
      }
      // nu simplex
      {
        std::vector<RowEntry> row;
        for (int k = 0; k < m.num_local(s); ++k) row.push_back({art.nu[t][m.sa_index(s, k)], 1.0});
        lp.add_row(row, Rel::EQ, 1.0);
      }
      // V <= sum_a nu Q (with V >= Q above this pins V to the selected value)
      {
        BilinearRow row;
        row.lin = {{art.v[t][s], 1.0}};
        for (int k = 0; k < m.num_local(s); ++k) {
          const int i = m.sa_index(s, k);
          row.bil.push_back({art.nu[t][i], art.q[t][i], -1.0});
        }
        bp.bilinear.push_back(std::move(row));
      }
      // Vp >= sum_a nu Qp (principal pays the selected action's cost-to-go)
      {
        BilinearRow row;
        row.lin = {{art.vp[t][s], -1.0}};
        for (int k = 0; k < m.num_local(s); ++k) {
          const int i = m.sa_index(s, k);
          row.bil.push_back({art.nu[t][i], art.qp[t][i], 1.0});
        }
        bp.bilinear.push_back(std::move(row));
      }
      // flow balance: outflow in lambda, inflow in the products mu
      {
        std::vector<double> coef(lp.num_vars, 0.0);
        for (int k = 0; k < m.num_local(s); ++k) coef[art.lam[t][m.sa_index(s, k)]] += 1.0;
        for (int sp : part.live_states)
          for (int k = 0; k < m.num_local(sp); ++k)
            for (const auto& o : m.trans[sp][k])
              if (o.to == s) coef[art.mu[t][m.sa_index(sp, k)]] -= o.prob;
        std::vector<RowEntry> row;
        for (int j = 0; j < lp.num_vars; ++j)
          if (coef[j] != 0.0) row.push_back({j, coef[j]});
        lp.add_row(row, Rel::EQ, s == m.initial ? 1.0 : 0.0);
      }
    }
    // the selected policy's occupancy meets the reach requirement
    {
      std::vector<RowEntry> row;
      for (int s : part.live_states)
        for (int k = 0; k < m.num_local(s); ++k) {
          const int i = m.sa_index(s, k);
          if (r[i] > 0.0) row.push_back({art.mu[t][i], r[i]});
        }
      lp.add_row(row, Rel::EQ, art.rmax);
    }
    // worst-case objective
    if (part.in_live[m.initial])
      lp.add_row({{art.omega, 1.0}, {art.vp[t][m.initial], -1.0}}, Rel::GE, 0.0);
  }

  // NS mode: all offer mass at a state rides on the nubar-selected action
  if (single_action)
    for (int s : part.live_states) {
      std::vector<RowEntry> simplex;
      BilinearRow row;  // sum_a gamma - sum_a nubar gamma <= 0
      for (int k = 0; k < m.num_local(s); ++k) {
        const int i = m.sa_index(s, k);
        simplex.push_back({art.nubar[i], 1.0});
        row.lin.push_back({art.gamma[i], 1.0});
        row.bil.push_back({art.nubar[i], art.gamma[i], -1.0});
      }
      lp.add_row(simplex, Rel::EQ, 1.0);
      bp.bilinear.push_back(std::move(row));
    }

  return bp;
}

// DC split of one bilinear row "lin + sum w x y <= 0" into Z(x) - Y(x) <= 0
// with Z, Y convex: each product x*y = 1/4[(x+y)^2 - (x-y)^2]; positive
// weights put the plus-square in Z, negative ones the minus-square.
inline std::pair<QuadConstraint, QuadConstraint> dc_split(const BilinearRow& row) {
  QuadConstraint z, y;
  z.lin = row.lin;
  for (const auto& t : row.bil) {
    if (t.w == 0.0) continue;
    QuadTerm plus{std::fabs(t.w) / 4.0, {{t.x, 1.0}, {t.y, 1.0}}};
    QuadTerm minus{std::fabs(t.w) / 4.0, {{t.x, 1.0}, {t.y, -1.0}}};
    if (t.x == t.y) {  // square term: (x+x)/2 = x twice, (x-x) vanishes
      plus.a = {{t.x, 2.0}};
      minus.a.clear();
      minus.w = 0.0;
    }
    if (t.w > 0.0) {
      z.quad.push_back(std::move(plus));
      if (minus.w > 0.0) y.quad.push_back(std::move(minus));
    } else {
      if (minus.w > 0.0) z.quad.push_back(std::move(minus));
      y.quad.push_back(std::move(plus));
    }
  }
  return {std::move(z), std::move(y)};
}

struct CcpConfig {
  double tau0 = 1.0;
  double tau_max = 1e4;
  double zeta = 1.5;
  double delta_bar = 1e-4;         // stall threshold on the penalty objective
  double delta_violation = 1e-5;   // feasibility threshold on the total slack
  long max_iterations = 500;
  QcOptions qc;
};

struct CcpTrace {
  struct Step {
    int iteration = 0;
    double tau = 0.0;
    double objective = 0.0;  // penalty objective Z0 + tau * total slack
    double slack = 0.0;      // exact total bilinear violation at the iterate
  };
  std::vector<Step> steps;
  std::vector<double> final_point;

  std::string to_csv() const {
    std::string out = "iteration,tau,objective,slack\n";
    char buf[128];
    for (const auto& s : steps) {
      std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g\n", s.iteration, s.tau, s.objective,
                    s.slack);
      out += buf;
    }
    return out;
  }
};

namespace detail {

// Dense Gaussian elimination with partial pivoting for the small chain
// systems below; a[i] holds row i with the right-hand side appended.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a) {
  const int n = static_cast<int>(a.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    if (std::fabs(a[c][c]) < 1e-12) continue;
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      const double f = a[r][c] / a[c][c];
      for (int c2 = c; c2 <= n; ++c2) a[r][c2] -= f * a[c][c2];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (std::fabs(a[i][i]) > 1e-12) x[i] = a[i][n] / a[i][i];
  return x;
}

}  // namespace detail

// Start point that satisfies every row of the NLP exactly: selections on the
// max-reach witness policy, offers equal to the conservative (all-types)
// convincing cost concentrated on the selected actions, occupancies equal to
// the witness chain's exact visit counts, and payments evaluated through the
// chain. Starting feasible matters: the penalized linearization has spurious
// fixed points far from feasibility (a uniform-selection start stalls even on
// two-state examples because the flow rows pin the occupancy to a paid action
// while the quadratic linearization gap blocks the long move of the
// selection variables), so the procedure is run as a descent from a feasible
// baseline instead.
inline std::vector<double> default_ccp_start(const BilinearProgram& bp) {
  const MdpModel& m = bp.model;
  const NlpArtifacts& art = bp.art;
  std::vector<double> x(bp.lp.num_vars, 0.0);
  if (bp.part.num_live() == 0 || !bp.part.in_live[m.initial]) return x;
  const int n = bp.part.num_live();
  auto reach = max_reach(m, bp.part);
  const auto& witness = reach.witness;
  std::vector<int> sel_local(m.num_states(), -1);
  for (int s : bp.part.live_states)
    for (int k = 0; k < m.num_local(s); ++k)
      if (m.avail[s][k] == witness[s]) sel_local[s] = k;
  const auto cons = conservative_cost(m, bp.types, bp.part, art.eps_bar);

  // visit counts: (I - P_sel^T) visits = delta_init
  std::vector<std::vector<double>> av(n, std::vector<double>(n + 1, 0.0));
  // payments: (I - P_sel) vp = gamma_sel
  std::vector<std::vector<double>> ap(n, std::vector<double>(n + 1, 0.0));
  for (int vi = 0; vi < n; ++vi) {
    const int s = bp.part.live_states[vi];
    av[vi][vi] = 1.0;
    ap[vi][vi] = 1.0;
    if (s == m.initial) av[vi][n] = 1.0;
    const int k = sel_local[s];
    if (k < 0) continue;
    ap[vi][n] = cons[m.sa_index(s, k)];
    for (const auto& o : m.trans[s][k])
      if (bp.part.in_live[o.to]) {
        av[bp.part.live_index[o.to]][vi] -= o.prob;
        ap[vi][bp.part.live_index[o.to]] -= o.prob;
      }
  }
  const auto visits = detail::dense_solve(std::move(av));
  const auto vp = detail::dense_solve(std::move(ap));

  for (int s : bp.part.live_states) {
    const int vi = bp.part.live_index[s];
    const int ksel = sel_local[s];
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      if (k == ksel) x[art.gamma[i]] = std::min(cons[i], bp.lp.up[art.gamma[i]]);
      if (art.nubar[i] >= 0) x[art.nubar[i]] = k == ksel ? 1.0 : 0.0;
    }
    for (int t = 0; t < bp.types.num_types(); ++t) {
      double vbest = -kInf;
      for (int k = 0; k < m.num_local(s); ++k) {
        const int i = m.sa_index(s, k);
        const bool sel = k == ksel;
        x[art.nu[t][i]] = sel ? 1.0 : 0.0;
        x[art.q[t][i]] = bp.types.reward[t][i] + x[art.gamma[i]];
        if (sel) {
          const double cap = std::min(std::max(0.0, visits[vi]), bp.lp.up[art.lam[t][i]]);
          x[art.lam[t][i]] = cap;
          x[art.mu[t][i]] = cap;
        }
        double qp = x[art.gamma[i]];
        for (const auto& o : m.trans[s][k])
          if (bp.part.in_live[o.to]) qp += o.prob * vp[bp.part.live_index[o.to]];
        x[art.qp[t][i]] = qp;
        vbest = std::max(vbest, x[art.q[t][i]]);
      }
      x[art.v[t][s]] = vbest;
      x[art.vp[t][s]] = std::max(0.0, vp[vi]);
    }
  }
  x[art.omega] = std::max(0.0, vp[bp.part.live_index[m.initial]]);
  return x;
}

namespace detail {

inline IncentiveSchedule extract_nlp_schedule(const BilinearProgram& bp,
                                              const std::vector<double>& x) {
  const MdpModel& m = bp.model;
  IncentiveSchedule sched = IncentiveSchedule::zero(m);
  sched.epsilon = bp.art.eps_bar;
  sched.single_action = bp.art.single_offer;
  for (int s : bp.part.live_states) {
    int kept = -1;
    double best = 0.0;
    for (int k = 0; k < m.num_local(s); ++k) {
      const int i = m.sa_index(s, k);
      double g = std::max(0.0, x[bp.art.gamma[i]]);
      if (g < 1e-9) g = 0.0;
      sched.offers[i] = g;
      if (g > best) {
        best = g;
        kept = k;
      }
    }
    if (bp.art.single_offer && kept >= 0)
      for (int k = 0; k < m.num_local(s); ++k)
        if (k != kept) sched.offers[m.sa_index(s, k)] = 0.0;
  }
  return sched;
}

}  // namespace detail

inline std::tuple<SolveReport, IncentiveSchedule, CcpTrace> pccp_solve(
    const BilinearProgram& bp, const CcpConfig& cfg = {}, std::vector<double> start = {}) {
  SolveReport rep;
  rep.method = bp.art.single_offer ? "nsbmp-ccp" : "nbmp-ccp";
  rep.epsilon = bp.art.eps_bar;
  CcpTrace trace;

  if (bp.part.num_live() == 0 || !bp.part.in_live[bp.model.initial]) {
    IncentiveSchedule sched = IncentiveSchedule::zero(bp.model);
    sched.epsilon = bp.art.eps_bar;
    sched.single_action = bp.art.single_offer;
    auto ver = verify_schedule(bp.model, bp.types, bp.part, sched);
    rep.fill_from(ver);
    return {rep, sched, trace};
  }

  if (start.empty()) start = default_ccp_start(bp);
  if (static_cast<int>(start.size()) != bp.lp.num_vars)
    throw std::invalid_argument("pccp_solve: start point has the wrong dimension");

  const int nrows = static_cast<int>(bp.bilinear.size());
  std::vector<std::pair<QuadConstraint, QuadConstraint>> splits;
  splits.reserve(nrows);
  for (const auto& row : bp.bilinear) splits.push_back(dc_split(row));

  auto total_violation = [&](const std::vector<double>& x) {
    double total = 0.0;
    for (const auto& row : bp.bilinear) total += std::max(0.0, row.value(x));
    return total;
  };

  std::vector<double> xk = std::move(start);
  double tau = cfg.tau0;
  bool accepted = false;
  std::string fail_reason;

  for (long it = 0; it < cfg.max_iterations; ++it) {
    // subproblem: base LP + one penalized slack per split row, concave halves
    // linearized at the incumbent
    LinearProgram sub = bp.lp;
    std::vector<QuadConstraint> qcs;
    qcs.reserve(nrows);
    std::vector<double> grad(bp.lp.num_vars);
    for (int i = 0; i < nrows; ++i) {
      const auto& [zc, yc] = splits[i];
      const int slack = sub.add_var(0.0, kInf, tau);
      QuadConstraint qc = zc;
      // subtract the linearization of Y at xk: Y(xk) + g^T (x - xk)
      std::fill(grad.begin(), grad.end(), 0.0);
      yc.add_gradient(xk, grad);
      double c0 = qc.c0 - yc.value(xk);
      for (int j = 0; j < bp.lp.num_vars; ++j)
        if (grad[j] != 0.0) {
          qc.lin.push_back({j, -grad[j]});
          c0 += grad[j] * xk[j];
        }
      qc.c0 = c0;
      qc.lin.push_back({slack, -1.0});
      qcs.push_back(std::move(qc));
    }
    // seed the outer approximation with tangents at the incumbent, extended
    // by its minimal feasible slacks (the exact bilinear violations)
    QcOptions qc_opt = cfg.qc;
    qc_opt.hint = xk;
    qc_opt.hint.resize(sub.num_vars, 0.0);
    for (int i = 0; i < nrows; ++i)
      qc_opt.hint[bp.lp.num_vars + i] = std::max(0.0, bp.bilinear[i].value(xk));
    auto st = solve_convex_qc(sub, qcs, qc_opt);
    rep.iterations = it + 1;
    if (st.result != SolveResult::Optimal) {
      fail_reason = std::string("convex subproblem ") + to_string(st.result) +
                    " at iteration " + std::to_string(it);
      break;
    }
    std::vector<double> xnext(st.x.begin(), st.x.begin() + bp.lp.num_vars);
    // exact penalties of both iterates at the current tau: the previous point
    // is feasible for this subproblem with slacks equal to its violations, so
    // the improvement is nonnegative up to the QC tolerance
    const double viol_prev = total_violation(xk);
    const double viol = total_violation(xnext);
    const double penalty_prev = xk[bp.art.omega] + tau * viol_prev;
    const double penalty = xnext[bp.art.omega] + tau * viol;
    trace.steps.push_back({static_cast<int>(it), tau, penalty, viol});
    xk = std::move(xnext);
    if (penalty_prev - penalty <= cfg.delta_bar) {
      if (viol <= cfg.delta_violation) {
        accepted = true;
        break;
      }
      if (tau >= cfg.tau_max) {
        fail_reason = "stalled at tau_max with total slack " + std::to_string(viol);
        break;
      }
    }
    tau = std::min(cfg.zeta * tau, cfg.tau_max);
  }
  trace.final_point = xk;
  if (!accepted && fail_reason.empty())
    fail_reason = "max_iterations reached without meeting the feasibility test";

  IncentiveSchedule sched = detail::extract_nlp_schedule(bp, xk);
  if (!accepted) {
    rep.feasible = false;
    rep.diagnostics = fail_reason;
    return {rep, sched, trace};
  }
  auto ver = verify_schedule(bp.model, bp.types, bp.part, sched);
  rep.fill_from(ver);
  if (!ver.feasible) {
    rep.diagnostics = "extracted schedule failed verification";
    return {rep, sched, trace};
  }
  rep.proven_optimal = false;  // local method
  rep.lower_bound = weak_duality_lower_bound(bp.model, bp.types, bp.part);
  return {rep, sched, trace};
}

inline std::tuple<SolveReport, IncentiveSchedule, CcpTrace> solve_nbmp_ccp(
    const MdpModel& m, const TypeSet& types, const StatePartition& part, double eps_bar,
    const CcpConfig& cfg = {}) {
  return pccp_solve(build_nbmp_nlp(m, types, part, eps_bar, false), cfg);
}

inline std::tuple<SolveReport, IncentiveSchedule, CcpTrace> solve_nsbmp_ccp(
    const MdpModel& m, const TypeSet& types, const StatePartition& part, double eps_bar,
    const CcpConfig& cfg = {}) {
  return pccp_solve(build_nbmp_nlp(m, types, part, eps_bar, true), cfg);
}

// Weak-duality suboptimality ratio: any feasible schedule's cost over the best
// single-type optimum (each single type alone is a relaxation). Zero lower
// bound with a positive achieved cost reports +infinity.
inline double suboptimality_bound(const MdpModel& m, const TypeSet& types,
                                  const StatePartition& part, double eps_bar,
                                  double achieved_cost) {
  double lower = 0.0;
  for (int theta = 0; theta < types.num_types(); ++theta) {
    auto phi = cost_of_control(m, types, theta, part, eps_bar);
    lower = std::max(lower, min_cost_max_reach(m, part, phi).second);
  }
  if (lower <= 0.0) return achieved_cost > 1e-12 ? kInf : 1.0;
  return achieved_cost / lower;
}

}  // namespace bmp
