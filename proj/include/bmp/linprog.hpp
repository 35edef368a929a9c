#pragma once
// Sparse LP / MILP / convex-QC problem descriptions and solve status types.

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmp/mdp.hpp"  // for kInf

namespace bmp {

enum class Rel { LE, EQ, GE };

struct RowEntry {
  int col = 0;
  double coef = 0.0;
};

struct LinearProgram {
  int num_vars = 0;
  std::vector<double> obj;  // minimization sense
  std::vector<double> lo, up;
  struct Row {
    std::vector<RowEntry> coef;
    Rel rel = Rel::LE;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int add_var(double lb = 0.0, double ub = kInf, double cost = 0.0) {
    lo.push_back(lb);
    up.push_back(ub);
    obj.push_back(cost);
    return num_vars++;
  }
  void add_row(std::vector<RowEntry> coef, Rel rel, double rhs) {
    rows.push_back(Row{std::move(coef), rel, rhs});
  }

  void check_well_formed() const {
    if (static_cast<int>(obj.size()) != num_vars || static_cast<int>(lo.size()) != num_vars ||
        static_cast<int>(up.size()) != num_vars)
      throw std::invalid_argument("LinearProgram: dimension mismatch");
    for (int j = 0; j < num_vars; ++j) {
      if (std::isnan(obj[j]) || std::isinf(obj[j])) throw std::invalid_argument("bad objective coef");
      if (lo[j] > up[j]) throw std::invalid_argument("crossed variable bounds");
    }
    for (const auto& r : rows) {
      if (std::isnan(r.rhs) || std::isinf(r.rhs)) throw std::invalid_argument("bad rhs");
      for (const auto& e : r.coef) {
        if (e.col < 0 || e.col >= num_vars) throw std::invalid_argument("row index out of range");
        if (std::isnan(e.coef) || std::isinf(e.coef)) throw std::invalid_argument("bad row coef");
      }
    }
  }

  // Plain-text debug dump: one constraint per line, "coef*var ... REL rhs".
  std::string dump() const {
    std::string out;
    char buf[64];
    auto term = [&](double c, int j) {
      std::snprintf(buf, sizeof(buf), "%+.12g*x%d ", c, j);
      out += buf;
    };
    out += "min: ";
    for (int j = 0; j < num_vars; ++j)
      if (obj[j] != 0.0) term(obj[j], j);
    out += "\n";
    for (const auto& r : rows) {
      for (const auto& e : r.coef) term(e.coef, e.col);
      out += (r.rel == Rel::LE ? "<= " : r.rel == Rel::EQ ? "== " : ">= ");
      std::snprintf(buf, sizeof(buf), "%.12g\n", r.rhs);
      out += buf;
    }
    for (int j = 0; j < num_vars; ++j) {
      std::snprintf(buf, sizeof(buf), "x%d in [%g, %g]\n", j, lo[j], up[j]);
      out += buf;
    }
    return out;
  }
};

struct MixedIntegerProgram {
  LinearProgram lp;
  std::vector<int> binaries;  // variable indices restricted to {0,1}
  // Optional structure hint: groups of binaries such that every feasible
  // point sets at most one member of the group to 1 (enforced by the rows).
  // Branch & bound may branch on whole groups, which shrinks the tree
  // dramatically compared to one-variable dichotomies.
  std::vector<std::vector<int>> sos1_groups;
};

// One convex quadratic constraint: sum_k w_k * (a_k^T x)^2 + lin^T x + c0 <= 0
// with every weight w_k > 0 (the quadratic part is PSD by construction).
struct QuadTerm {
  double w = 0.0;
  std::vector<RowEntry> a;
};
struct QuadConstraint {
  std::vector<QuadTerm> quad;
  std::vector<RowEntry> lin;
  double c0 = 0.0;

  double value(const std::vector<double>& x) const {
    double v = c0;
    for (const auto& e : lin) v += e.coef * x[e.col];
    for (const auto& t : quad) {
      double s = 0.0;
      for (const auto& e : t.a) s += e.coef * x[e.col];
      v += t.w * s * s;
    }
    return v;
  }
  // Gradient as a dense vector add: g += grad(value)(x).
  void add_gradient(const std::vector<double>& x, std::vector<double>& g) const {
    for (const auto& e : lin) g[e.col] += e.coef;
    for (const auto& t : quad) {
      double s = 0.0;
      for (const auto& e : t.a) s += e.coef * x[e.col];
      const double f = 2.0 * t.w * s;
      for (const auto& e : t.a) g[e.col] += f * e.coef;
    }
  }
};

enum class SolveResult { Optimal, Infeasible, Unbounded, IterationLimit };

struct SolveStatus {
  SolveResult result = SolveResult::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;       // primal solution when Optimal (or incumbent)
  std::vector<double> duals;   // row duals for LPs
  std::vector<double> farkas;  // row certificate when Infeasible (LPs)
  std::vector<double> ray;     // improving ray when Unbounded (LPs)
  double gap = 0.0;            // certified relative duality gap (LP) or abs gap (MILP)
  long iterations = 0;
  bool has_incumbent = false;  // MILP iteration-limit case
};

inline const char* to_string(SolveResult r) {
  switch (r) {
    case SolveResult::Optimal: return "optimal";
    case SolveResult::Infeasible: return "infeasible";
    case SolveResult::Unbounded: return "unbounded";
    default: return "iteration_limit";
  }
}

}  // namespace bmp
