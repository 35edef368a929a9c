#pragma once
// Branch & bound for mixed binary programs on top of the simplex engine.
// Best-bound node selection (ties by node id), most-fractional branching,
// warm starts from the parent basis. Optional heuristic callback and seed
// incumbent only tighten the upper bound; optimality is certified by bound
// convergence, so the optimal value is deterministic.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <vector>

#include "bmp/simplex.hpp"

namespace bmp {

struct MilpOptions {
  double int_tol = 1e-6;
  double abs_gap = 1e-6;
  long node_limit = 500000;
  long lp_iter_limit = -1;
  // Given a node-LP relaxation point, may return a feasible objective value
  // and (optionally) a full feasible point for incumbent use.
  std::function<std::optional<std::pair<double, std::vector<double>>>(
      const std::vector<double>&)>
      heuristic;
  std::optional<std::pair<double, std::vector<double>>> seed_incumbent;
};

inline SolveStatus solve_milp(const MixedIntegerProgram& mip, const MilpOptions& opt = {}) {
  mip.lp.check_well_formed();
  for (int j : mip.binaries)
    if (j < 0 || j >= mip.lp.num_vars)
      throw std::invalid_argument("binary index out of range");
  // map each binary to its (at most one) declared sum<=1 / sum==1 group
  std::vector<int> group_of(mip.lp.num_vars, -1);
  for (size_t g = 0; g < mip.sos1_groups.size(); ++g)
    for (int j : mip.sos1_groups[g]) {
      if (j < 0 || j >= mip.lp.num_vars)
        throw std::invalid_argument("sos1 group index out of range");
      group_of[j] = static_cast<int>(g);
    }

  SimplexSolver solver(mip.lp);
  // binaries live in [0,1] unless the caller already fixed them tighter
  for (int j : mip.binaries) {
    const double lb = std::max(0.0, mip.lp.lo[j]);
    const double ub = std::min(1.0, mip.lp.up[j]);
    solver.set_var_bounds(j, lb, ub);
  }

  struct Node {
    double bound;
    long id;
    std::vector<std::pair<int, char>> fixes;  // (binary var, 0 or 1)
    std::shared_ptr<SimplexSolver::Basis> basis;
  };
  struct Cmp {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };
  std::priority_queue<Node, std::vector<Node>, Cmp> open;

  double incumbent_val = kInf;
  std::vector<double> incumbent_x;
  bool incumbent_set = false;
  if (opt.seed_incumbent) {
    incumbent_val = opt.seed_incumbent->first;
    incumbent_x = opt.seed_incumbent->second;
    incumbent_set = true;
  }

  long next_id = 0;
  open.push(Node{-kInf, next_id++, {}, nullptr});

  SolveStatus out;
  long nodes = 0;
  double best_bound_seen = -kInf;
  bool any_feasible_lp = false;
  bool hit_limit = false;

  std::vector<double> root_lo(mip.lp.num_vars), root_up(mip.lp.num_vars);
  for (int j = 0; j < mip.lp.num_vars; ++j) {
    root_lo[j] = solver.var_lo(j);
    root_up[j] = solver.var_up(j);
  }

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent_val - opt.abs_gap && incumbent_set) continue;
    if (++nodes > opt.node_limit) {
      hit_limit = true;
      break;
    }
    // apply node bounds
    for (int j : mip.binaries) solver.set_var_bounds(j, root_lo[j], root_up[j]);
    for (const auto& [j, v] : node.fixes)
      solver.set_var_bounds(j, v ? 1.0 : root_lo[j], v ? root_up[j] : 0.0);
    if (node.basis) solver.load_basis(*node.basis);
    SolveStatus lp = solver.solve(opt.lp_iter_limit);
    out.iterations += lp.iterations;
    if (lp.result == SolveResult::Unbounded) {
      out.result = SolveResult::Unbounded;
      out.ray = lp.ray;
      return out;
    }
    if (lp.result == SolveResult::Infeasible) continue;
    if (lp.result == SolveResult::IterationLimit) {
      hit_limit = true;
      continue;
    }
    any_feasible_lp = true;
    const double bound = lp.objective;
    best_bound_seen = std::max(best_bound_seen, node.bound);
    if (incumbent_set && bound >= incumbent_val - opt.abs_gap) continue;
    // branch selection: groups are tried in declared order (the caller lists
    // the structurally decisive groups first); within the first group holding
    // a fractional member, take its most fractional variable. Binaries
    // outside any group fall back to global most-fractional.
    int branch_var = -1;
    double best_frac = opt.int_tol;
    for (const auto& grp : mip.sos1_groups) {
      for (int j : grp) {
        const double dist = std::fabs(lp.x[j] - std::floor(lp.x[j] + 0.5));
        if (dist > best_frac + 1e-12) {
          best_frac = dist;
          branch_var = j;
        }
      }
      if (branch_var >= 0) break;
    }
    if (branch_var < 0)
      for (int j : mip.binaries) {
        const double dist = std::fabs(lp.x[j] - std::floor(lp.x[j] + 0.5));
        if (dist > best_frac + 1e-12) {
          best_frac = dist;
          branch_var = j;
        }
      }
    if (branch_var < 0) {
      // integral: candidate incumbent
      if (!incumbent_set || bound < incumbent_val - 1e-12) {
        incumbent_val = bound;
        incumbent_x = lp.x;
        incumbent_set = true;
      }
      continue;
    }
    if (opt.heuristic) {
      if (auto h = opt.heuristic(lp.x)) {
        if (!incumbent_set || h->first < incumbent_val - 1e-12) {
          incumbent_val = h->first;
          incumbent_x = h->second;
          incumbent_set = true;
        }
      }
    }
    // reduced-cost fixing: from the optimal node dictionary, any feasible
    // point of this subtree satisfies z >= bound + d_j * (move of a nonbasic
    // binary off its bound), so moves that would pass the incumbent are out
    std::vector<std::pair<int, char>> rc_fixes;
    if (incumbent_set && !lp.duals.empty()) {
      std::vector<double> acc(mip.lp.num_vars, 0.0);
      for (size_t r = 0; r < mip.lp.rows.size(); ++r) {
        const double y = lp.duals[r];
        if (y == 0.0) continue;
        for (const auto& e : mip.lp.rows[r].coef) acc[e.col] += y * e.coef;
      }
      const double slack = incumbent_val - opt.abs_gap - bound;
      std::vector<char> fixed(mip.lp.num_vars, 0);
      for (const auto& [j, v] : node.fixes) fixed[j] = 1;
      for (int j : mip.binaries) {
        if (fixed[j]) continue;
        const double d = mip.lp.obj[j] - acc[j];
        if (lp.x[j] <= opt.int_tol && d > slack)
          rc_fixes.emplace_back(j, char(0));
        else if (lp.x[j] >= 1.0 - opt.int_tol && -d > slack)
          rc_fixes.emplace_back(j, char(1));
      }
    }
    auto basis = std::make_shared<SimplexSolver::Basis>(solver.save_basis());
    auto push_child = [&](const std::vector<std::pair<int, char>>& extra) {
      Node child;
      child.bound = bound;
      child.id = next_id++;
      child.fixes = node.fixes;
      child.fixes.insert(child.fixes.end(), rc_fixes.begin(), rc_fixes.end());
      child.fixes.insert(child.fixes.end(), extra.begin(), extra.end());
      child.basis = basis;
      if (!incumbent_set || child.bound < incumbent_val - opt.abs_gap) open.push(child);
    };
    // if the fractional variable sits in a sum<=1 group, split the group's
    // free members in two (each child zeroes one half) instead of a
    // one-variable dichotomy; every feasible point lands in some child
    bool branched = false;
    if (const int g = group_of[branch_var]; g >= 0) {
      std::vector<char> fixed(mip.lp.num_vars, 0);
      for (const auto& [j, v] : node.fixes) fixed[j] = 1;
      std::vector<int> free_members;
      for (int j : mip.sos1_groups[g])
        if (!fixed[j]) free_members.push_back(j);
      if (free_members.size() >= 2) {
        std::sort(free_members.begin(), free_members.end(),
                  [&](int a, int b) { return lp.x[a] > lp.x[b]; });
        double total = 0.0;
        for (int j : free_members) total += lp.x[j];
        size_t cut = 1;
        double acc = lp.x[free_members[0]];
        while (cut + 1 < free_members.size() && acc < 0.5 * total)
          acc += lp.x[free_members[cut++]];
        std::vector<std::pair<int, char>> zero_hi, zero_lo;
        for (size_t i = 0; i < free_members.size(); ++i)
          (i < cut ? zero_hi : zero_lo).emplace_back(free_members[i], char(0));
        push_child(zero_lo);  // keep the high-value half free
        push_child(zero_hi);
        branched = true;
      }
    }
    if (!branched)
      for (char v : {char(0), char(1)}) push_child({{branch_var, v}});
  }

  if (hit_limit) {
    out.result = SolveResult::IterationLimit;
    out.has_incumbent = incumbent_set;
    if (incumbent_set) {
      out.objective = incumbent_val;
      out.x = incumbent_x;
    }
    return out;
  }
  if (!incumbent_set) {
    out.result = SolveResult::Infeasible;
    (void)any_feasible_lp;
    return out;
  }
  out.result = SolveResult::Optimal;
  out.objective = incumbent_val;
  out.x = incumbent_x;
  out.gap = 0.0;
  return out;
}

}  // namespace bmp
