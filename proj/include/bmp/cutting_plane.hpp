#pragma once
// Outer-approximation (Kelley) solver for linear objectives over linear plus
// convex-quadratic constraints. Repeatedly solves an LP relaxation, adds a
// first-order cut at the incumbent for every violated quadratic constraint,
// and stops when the maximum violation is within tolerance. Adding
// constraints only tightens the relaxation, so the optimal value of
// successive relaxations with the same cut set is monotone. To keep the LP
// small when many quadratics are present, cuts that have gone slack are
// pruned and the solver is rebuilt once the row count passes a budget; all
// cuts are globally valid, so pruning never cuts off a feasible point.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "bmp/simplex.hpp"

namespace bmp {

struct QcOptions {
  double feas_tol = 1e-7;
  int max_cut_rounds = 400;
  // Variables appearing in any quadratic term get this artificial box when
  // they lack finite bounds, so the LP relaxations stay bounded; if the final
  // point leans on the artificial box the problem is reported Unbounded.
  double auto_box = 1e8;
  // Row budget before slack cuts are pruned; 0 picks a size-based default.
  int max_rows = 0;
  // Optional point for initial tangent cuts on every quadratic constraint
  // (a good hint, e.g. a known near-optimal point, saves most cut rounds).
  std::vector<double> hint;
};

inline SolveStatus solve_convex_qc(const LinearProgram& base,
                                   const std::vector<QuadConstraint>& qcs,
                                   const QcOptions& opt = {}) {
  LinearProgram lp = base;
  lp.check_well_formed();
  std::vector<char> boxed(lp.num_vars, 0);
  for (const auto& q : qcs)
    for (const auto& t : q.quad)
      for (const auto& e : t.a) {
        if (lp.lo[e.col] == -kInf) {
          lp.lo[e.col] = -opt.auto_box;
          boxed[e.col] = 1;
        }
        if (lp.up[e.col] == kInf) {
          lp.up[e.col] = opt.auto_box;
          boxed[e.col] = 1;
        }
      }

  struct Cut {
    std::vector<RowEntry> row;
    double rhs = 0.0;
  };
  std::vector<Cut> cuts;
  std::vector<double> grad(lp.num_vars);
  auto tangent = [&](const QuadConstraint& q, const std::vector<double>& at) -> Cut {
    // gradient cut: q(at) + grad(at)^T (x - at) <= 0
    std::fill(grad.begin(), grad.end(), 0.0);
    q.add_gradient(at, grad);
    Cut c;
    c.rhs = -q.value(at);
    for (int j = 0; j < lp.num_vars; ++j)
      if (std::fabs(grad[j]) > 1e-13) {
        c.row.push_back({j, grad[j]});
        c.rhs += grad[j] * at[j];
      }
    return c;
  };
  if (static_cast<int>(opt.hint.size()) == lp.num_vars)
    for (const auto& q : qcs) {
      auto c = tangent(q, opt.hint);
      if (!c.row.empty()) cuts.push_back(std::move(c));
    }

  const int max_rows = opt.max_rows > 0
                           ? opt.max_rows
                           : static_cast<int>(lp.rows.size() + qcs.size()) +
                                 std::max<int>(200, 2 * static_cast<int>(qcs.size()));

  auto make_solver = [&]() {
    auto s = std::make_unique<SimplexSolver>(lp);
    for (const auto& c : cuts) s->add_row(c.row, Rel::LE, c.rhs);
    return s;
  };
  auto solver = make_solver();

  SolveStatus st;
  for (int round = 0;; ++round) {
    st = solver->solve();
    if (st.result != SolveResult::Optimal) return st;
    if (round >= opt.max_cut_rounds) {
      st.result = SolveResult::IterationLimit;
      return st;
    }
    double worst = 0.0;
    bool cut_added = false;
    for (const auto& q : qcs) {
      const double v = q.value(st.x);
      worst = std::max(worst, v);
      if (v <= opt.feas_tol) continue;
      auto c = tangent(q, st.x);
      if (c.row.empty()) continue;  // flat yet violated: numerically impossible
      solver->add_row(c.row, Rel::LE, c.rhs);
      cuts.push_back(std::move(c));
      cut_added = true;
    }
    if (worst <= opt.feas_tol) {
      // solution must not rely on the artificial boxes
      for (int j = 0; j < lp.num_vars; ++j)
        if (boxed[j] && (std::fabs(st.x[j] - lp.lo[j]) < 1e-6 * opt.auto_box ||
                         std::fabs(st.x[j] - lp.up[j]) < 1e-6 * opt.auto_box) &&
            std::fabs(st.x[j]) > 0.5 * opt.auto_box) {
          st.result = SolveResult::Unbounded;
          return st;
        }
      st.result = SolveResult::Optimal;
      return st;
    }
    if (!cut_added) {
      st.result = SolveResult::IterationLimit;
      return st;
    }
    if (static_cast<int>(lp.rows.size() + cuts.size()) > max_rows) {
      // keep cuts that are tight (or nearly so) at the current point; the
      // dropped ones were slack, and any that become violated again will be
      // regenerated by a later round
      std::vector<Cut> kept;
      for (auto& c : cuts) {
        double lhs = 0.0;
        for (const auto& e : c.row) lhs += e.coef * st.x[e.col];
        if (lhs >= c.rhs - 1e-7) kept.push_back(std::move(c));
      }
      if (static_cast<int>(kept.size()) < static_cast<int>(cuts.size())) {
        cuts = std::move(kept);
        solver = make_solver();
      }
    }
  }
}

}  // namespace bmp
