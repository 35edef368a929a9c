#pragma once
// Built-in benchmark instances: the 4-product discount-planning model, a
// grid-world motion-planning model, and a small monotone-grid variant sized
// for the nonconvex solver.

#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bmp/mdp.hpp"

namespace bmp {

// Discount planning: states are the subsets of the n=4 products, the agent
// buys one product per step (or keeps its money), and all products must be
// sold. Three customer types, each pairing the products into two groups with
// an importance order. The cost of convincing a type to buy product i at
// state s (its deficit) is 1 when nothing is owned yet or the partner product
// is owned, otherwise 2 when i belongs to the more important group (or the
// groups are equally important) and 3 when it belongs to the less important
// one.
inline std::pair<MdpModel, TypeSet> discount_instance() {
  const int n = 4;
  const int full = (1 << n) - 1;
  MdpModel m;
  for (int s = 0; s <= full; ++s) {
    std::string name = "{";
    for (int i = 0; i < n; ++i)
      if (s & (1 << i)) name += std::to_string(i + 1) + ",";
    if (name.back() == ',') name.pop_back();
    name += "}";
    m.state_names.push_back(name);
  }
  m.action_names = {"keep"};
  for (int i = 0; i < n; ++i) m.action_names.push_back("buy" + std::to_string(i + 1));
  m.initial = 0;
  m.is_target.assign(full + 1, 0);
  m.is_target[full] = 1;
  m.avail.resize(full + 1);
  m.trans.resize(full + 1);
  for (int s = 0; s <= full; ++s) {
    m.avail[s].push_back(0);
    m.trans[s].push_back({{s, 1.0}});
    for (int i = 0; i < n; ++i)
      if (!(s & (1 << i))) {
        m.avail[s].push_back(1 + i);
        m.trans[s].push_back({{s | (1 << i), 1.0}});
      }
  }
  m.finalize();

  TypeSet t;
  t.type_names = {"theta1", "theta2", "theta3"};
  // group partner of each product and whether the second group dominates
  const int partner[3][4] = {{1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  const int in_g2[3][4] = {{0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}};
  const bool g2_dominates[3] = {true, true, false};
  t.reward.assign(3, std::vector<double>(m.sa_total, 0.0));
  for (int theta = 0; theta < 3; ++theta)
    for (int s = 0; s <= full; ++s)
      for (int k = 1; k < m.num_local(s); ++k) {
        const int i = m.avail[s][k] - 1;
        double deficit;
        if (s == 0 || (s & (1 << partner[theta][i])))
          deficit = 1.0;
        else if (in_g2[theta][i] || !g2_dominates[theta])
          deficit = 2.0;
        else
          deficit = 3.0;
        t.reward[theta][m.sa_index(s, k)] = -deficit;
      }
  t.finalize(m);
  return {m, t};
}

namespace detail {

// Shared grid builder: states are cells, actions are stay plus the listed
// unit moves, the target is the far corner. Three driver types: one charged
// by travel distance, one by a seeded congestion index of the destination
// cell, one by a 0.8/0.2 blend of both. Staying is free for every type.
inline std::pair<MdpModel, TypeSet> grid_instance(int rows, int cols,
                                                  const std::vector<std::pair<int, int>>& moves,
                                                  const std::vector<std::string>& move_names,
                                                  unsigned congestion_seed) {
  MdpModel m;
  auto id = [&](int r, int c) { return r * cols + c; };
  char buf[32];
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      std::snprintf(buf, sizeof(buf), "r%dc%d", r, c);
      m.state_names.push_back(buf);
    }
  m.action_names = {"stay"};
  for (const auto& nm : move_names) m.action_names.push_back(nm);
  m.initial = id(0, 0);
  m.is_target.assign(rows * cols, 0);
  m.is_target[id(rows - 1, cols - 1)] = 1;
  m.avail.resize(rows * cols);
  m.trans.resize(rows * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int s = id(r, c);
      m.avail[s].push_back(0);
      m.trans[s].push_back({{s, 1.0}});
      for (size_t d = 0; d < moves.size(); ++d) {
        const int nr = r + moves[d].first, nc = c + moves[d].second;
        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
        m.avail[s].push_back(1 + static_cast<int>(d));
        m.trans[s].push_back({{id(nr, nc), 1.0}});
      }
    }
  m.finalize();

  std::mt19937 rng(congestion_seed);
  std::uniform_int_distribution<int> cong(1, 10);
  std::vector<double> t_j(rows * cols);
  for (auto& v : t_j) v = cong(rng);

  TypeSet t;
  t.type_names = {"distance", "congestion", "blend"};
  t.reward.assign(3, std::vector<double>(m.sa_total, 0.0));
  for (int s = 0; s < rows * cols; ++s)
    for (int k = 1; k < m.num_local(s); ++k) {
      const int dest = m.trans[s][k][0].to;
      const double d = 1.0;  // unit moves
      t.reward[0][m.sa_index(s, k)] = -d;
      t.reward[1][m.sa_index(s, k)] = -2.0 * t_j[dest];
      t.reward[2][m.sa_index(s, k)] = -(0.8 * d + 0.2 * t_j[dest]);
    }
  t.finalize(m);
  return {m, t};
}

}  // namespace detail

// 6x9 grid with stay plus all four neighbor moves.
inline std::pair<MdpModel, TypeSet> motion_instance() {
  return detail::grid_instance(6, 9, {{0, 1}, {0, -1}, {1, 0}, {-1, 0}},
                               {"east", "west", "south", "north"}, 7u);
}

// 5x5 grid with stay plus the two target-directed moves, sized so that the
// nonconvex pipeline finishes quickly while keeping three competing types.
inline std::pair<MdpModel, TypeSet> ccp_grid_instance() {
  return detail::grid_instance(5, 5, {{0, 1}, {1, 0}}, {"east", "south"}, 7u);
}

}  // namespace bmp
