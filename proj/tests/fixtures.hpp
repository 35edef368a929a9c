#pragma once
// Shared hand-built test fixtures.

#include <random>

#include "bmp/mdp.hpp"

namespace bmp::fixtures {

// Two-state MDP: s1 with a1 (self loop) and a2 (-> s2); s2 absorbing target.
// Single type: R(s1,a1)=0, R(s1,a2)=-1.
inline std::pair<MdpModel, TypeSet> fig1_left() {
  MdpModel m;
  m.state_names = {"s1", "s2"};
  m.action_names = {"a1", "a2"};
  m.initial = 0;
  m.avail = {{0, 1}, {0}};
  m.trans = {{{{0, 1.0}}, {{1, 1.0}}}, {{{1, 1.0}}}};
  m.is_target = {0, 1};
  m.finalize();
  TypeSet t;
  t.type_names = {"theta"};
  t.reward = {{0.0, -1.0, 0.0}};
  t.finalize(m);
  return {m, t};
}

// fig1_left plus a3: half chance of staying, half of reaching s2; R(s1,a3)=-1.
inline std::pair<MdpModel, TypeSet> fig1_right() {
  MdpModel m;
  m.state_names = {"s1", "s2"};
  m.action_names = {"a1", "a2", "a3"};
  m.initial = 0;
  m.avail = {{0, 1, 2}, {0}};
  m.trans = {{{{0, 1.0}}, {{1, 1.0}}, {{0, 0.5}, {1, 0.5}}}, {{{1, 1.0}}}};
  m.is_target = {0, 1};
  m.finalize();
  TypeSet t;
  t.type_names = {"theta"};
  t.reward = {{0.0, -1.0, -1.0, 0.0}};
  t.finalize(m);
  return {m, t};
}

// Diamond: s0 -> {s1 | s2} -> s3 (target); every move costs the agent 1.
inline std::pair<MdpModel, TypeSet> diamond() {
  MdpModel m;
  m.state_names = {"s0", "s1", "s2", "s3"};
  m.action_names = {"stay", "left", "right", "go"};
  m.initial = 0;
  m.avail = {{0, 1, 2}, {0, 3}, {0, 3}, {0}};
  m.trans = {{{{0, 1.0}}, {{1, 1.0}}, {{2, 1.0}}},
             {{{1, 1.0}}, {{3, 1.0}}},
             {{{2, 1.0}}, {{3, 1.0}}},
             {{{3, 1.0}}}};
  m.is_target = {0, 0, 0, 1};
  m.finalize();
  TypeSet t;
  t.type_names = {"theta"};
  t.reward = {{0, -1, -1, 0, -1, 0, -1, 0}};
  t.finalize(m);
  return {m, t};
}

// Random valid MDP + types; a path from the initial state to a target is
// guaranteed, transitions may be stochastic.
inline std::pair<MdpModel, TypeSet> random_instance(std::mt19937& rng, int max_states = 12,
                                                    int max_types = 3) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 3 + static_cast<int>(rng() % static_cast<unsigned>(max_states - 2));
  const int num_actions = 2 + static_cast<int>(rng() % 2u);
  const int num_types = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_types));
  MdpModel m;
  for (int s = 0; s < n; ++s) m.state_names.push_back("s" + std::to_string(s));
  for (int a = 0; a < num_actions; ++a) m.action_names.push_back("a" + std::to_string(a));
  m.initial = 0;
  m.is_target.assign(n, 0);
  m.is_target[n - 1] = 1;
  m.avail.resize(n);
  m.trans.resize(n);
  for (int s = 0; s < n; ++s) {
    const int na = (s == n - 1) ? 1 : 1 + static_cast<int>(rng() % static_cast<unsigned>(num_actions));
    for (int a = 0; a < na; ++a) m.avail[s].push_back(a);
    m.trans[s].resize(na);
    for (int k = 0; k < na; ++k) {
      if (m.is_target[s]) {
        m.trans[s][k] = {{s, 1.0}};
        continue;
      }
      const int nsucc = 1 + static_cast<int>(rng() % 2u);
      double rem = 1.0;
      for (int q = 0; q < nsucc; ++q) {
        int to = static_cast<int>(rng() % static_cast<unsigned>(n));
        double p = (q == nsucc - 1) ? rem : rem * (0.25 + 0.5 * unif(rng));
        rem -= p;
        m.trans[s][k].push_back({to, p});
      }
    }
  }
  // guarantee a path 0 -> 1 -> ... -> n-1 through action 0
  for (int s = 0; s + 1 < n; ++s) {
    m.trans[s][0] = {{s + 1, 1.0}};
  }
  m.finalize();
  TypeSet t;
  t.reward.assign(num_types, std::vector<double>(m.sa_total, 0.0));
  for (int ty = 0; ty < num_types; ++ty) {
    t.type_names.push_back("theta" + std::to_string(ty));
    for (int i = 0; i < m.sa_total; ++i) t.reward[ty][i] = -2.0 * unif(rng);
  }
  t.finalize(m);
  return {m, t};
}

}  // namespace bmp::fixtures
