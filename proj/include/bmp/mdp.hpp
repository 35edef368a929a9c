#pragma once
// Core data model: MDPs, agent type sets, state partitions, and the
// horizon-expansion / target-absorbing model transforms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kRowSumTol = 1e-9;

struct Outcome {
  int to = 0;
  double prob = 0.0;
};

// A finite MDP with per-state action availability and an absorbing target set.
// States and actions are dense integer indices; names live at the I/O boundary.
struct MdpModel {
  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  int initial = 0;
  // avail[s] = global action ids available in s (nonempty, sorted unique).
  std::vector<std::vector<int>> avail;
  // trans[s][k] = outcome distribution of action avail[s][k] in state s.
  std::vector<std::vector<std::vector<Outcome>>> trans;
  std::vector<char> is_target;

  // Flat (state, local-action) indexing, built by finalize().
  std::vector<int> sa_offset;
  int sa_total = 0;

  int num_states() const { return static_cast<int>(state_names.size()); }
  int num_actions() const { return static_cast<int>(action_names.size()); }

  void finalize() {
    const int n = num_states();
    sa_offset.assign(n + 1, 0);
    for (int s = 0; s < n; ++s)
      sa_offset[s + 1] = sa_offset[s] + static_cast<int>(avail[s].size());
    sa_total = sa_offset[n];
  }

  int sa_index(int s, int k) const { return sa_offset[s] + k; }
  int num_local(int s) const { return static_cast<int>(avail[s].size()); }

  // Local index of global action a in state s, or -1 when unavailable.
  int local_of(int s, int a) const {
    const auto& as = avail[s];
    for (int k = 0; k < static_cast<int>(as.size()); ++k)
      if (as[k] == a) return k;
    return -1;
  }
};

// Reward tables for a finite set of agent types over the model's (s,a) pairs.
struct TypeSet {
  std::vector<std::string> type_names;
  // reward[t][sa_index(s,k)] = R_t(s, avail[s][k]).
  std::vector<std::vector<double>> reward;
  // rmax[t][s] = max_a reward, cached by finalize().
  std::vector<std::vector<double>> rmax;

  int num_types() const { return static_cast<int>(type_names.size()); }

  void finalize(const MdpModel& m) {
    rmax.assign(num_types(), std::vector<double>(m.num_states(), -kInf));
    for (int t = 0; t < num_types(); ++t)
      for (int s = 0; s < m.num_states(); ++s)
        for (int k = 0; k < m.num_local(s); ++k)
          rmax[t][s] = std::max(rmax[t][s], reward[t][m.sa_index(s, k)]);
  }
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  void fail(std::string msg) {
    ok = false;
    violations.push_back(std::move(msg));
  }
};

inline ValidationReport validate(const MdpModel& m, const TypeSet& types) {
  ValidationReport rep;
  const int n = m.num_states();
  if (n == 0) rep.fail("model has no states");
  if (m.initial < 0 || m.initial >= n) rep.fail("initial state index out of range");
  if (static_cast<int>(m.avail.size()) != n || static_cast<int>(m.trans.size()) != n ||
      static_cast<int>(m.is_target.size()) != n) {
    rep.fail("per-state table sizes disagree with state count");
    return rep;
  }
  for (int s = 0; s < n; ++s) {
    if (m.avail[s].empty()) rep.fail("state " + m.state_names[s] + " has empty action set");
    if (m.trans[s].size() != m.avail[s].size())
      rep.fail("state " + m.state_names[s] + " transition table size mismatch");
    for (size_t k = 0; k < m.trans[s].size() && k < m.avail[s].size(); ++k) {
      const int a = m.avail[s][k];
      if (a < 0 || a >= m.num_actions())
        rep.fail("state " + m.state_names[s] + " references dangling action index");
      double sum = 0.0;
      bool self_only = true;
      for (const auto& o : m.trans[s][k]) {
        if (o.to < 0 || o.to >= n) {
          rep.fail("state " + m.state_names[s] + " has dangling successor index");
          continue;
        }
        if (o.prob < -kRowSumTol || o.prob > 1.0 + kRowSumTol)
          rep.fail("probability out of [0,1] at state " + m.state_names[s]);
        sum += o.prob;
        if (o.to != s && o.prob > kRowSumTol) self_only = false;
      }
      if (std::fabs(sum - 1.0) > kRowSumTol)
        rep.fail("transition row of state " + m.state_names[s] + ", action " +
                 m.action_names[a] + " sums to " + std::to_string(sum));
      if (m.is_target[s] && !self_only)
        rep.fail("target state " + m.state_names[s] + " is not absorbing");
    }
  }
  if (types.num_types() == 0) rep.fail("type set is empty");
  for (int t = 0; t < types.num_types(); ++t) {
    if (static_cast<int>(types.reward[t].size()) != m.sa_total)
      rep.fail("type " + types.type_names[t] + " reward table size mismatch");
  }
  return rep;
}

// Disjoint cover of S: targets B, dead states S0 (zero reach probability
// under every policy), live remainder Sr.
struct StatePartition {
  std::vector<char> in_target, in_dead, in_live;
  std::vector<int> live_states;       // ascending state ids
  std::vector<int> live_index;        // state -> position in live_states or -1
  int num_live() const { return static_cast<int>(live_states.size()); }
};

inline StatePartition partition_states(const MdpModel& m) {
  const int n = m.num_states();
  StatePartition p;
  p.in_target.assign(n, 0);
  p.in_dead.assign(n, 0);
  p.in_live.assign(n, 0);
  // Backward fixpoint: states that can reach B with positive probability
  // under some policy (equivalently: via some positive-probability edge path).
  std::vector<char> can(n, 0);
  for (int s = 0; s < n; ++s) can[s] = m.is_target[s];
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      if (can[s]) continue;
      for (int k = 0; k < m.num_local(s) && !can[s]; ++k)
        for (const auto& o : m.trans[s][k])
          if (o.prob > kRowSumTol && can[o.to]) {
            can[s] = 1;
            changed = true;
            break;
          }
    }
  }
  p.live_index.assign(n, -1);
  for (int s = 0; s < n; ++s) {
    if (m.is_target[s]) {
      p.in_target[s] = 1;
    } else if (!can[s]) {
      p.in_dead[s] = 1;
    } else {
      p.in_live[s] = 1;
      p.live_index[s] = static_cast<int>(p.live_states.size());
      p.live_states.push_back(s);
    }
  }
  return p;
}

// Horizon expansion: states S x [N]; layers t < N advance the counter under
// every action; layer N applies the original dynamics back to layer 1 and is
// the only layer carrying rewards. Targets become B x [N], kept absorbing.
inline std::pair<MdpModel, TypeSet> expand_horizon(const MdpModel& m, const TypeSet& types,
                                                   int N) {
  if (N < 1) throw std::invalid_argument("expand_horizon: N must be >= 1");
  const int n = m.num_states();
  MdpModel e;
  e.action_names = m.action_names;
  e.state_names.resize(static_cast<size_t>(n) * N);
  e.avail.resize(static_cast<size_t>(n) * N);
  e.trans.resize(static_cast<size_t>(n) * N);
  e.is_target.assign(static_cast<size_t>(n) * N, 0);
  auto idx = [n](int s, int t) { return (t - 1) * n + s; };  // t in [1, N]
  for (int t = 1; t <= N; ++t)
    for (int s = 0; s < n; ++s) {
      const int es = idx(s, t);
      e.state_names[es] = m.state_names[s] + "@" + std::to_string(t);
      e.avail[es] = m.avail[s];
      e.is_target[es] = m.is_target[s];
      e.trans[es].resize(m.num_local(s));
      for (int k = 0; k < m.num_local(s); ++k) {
        if (m.is_target[s]) {
          e.trans[es][k] = {{es, 1.0}};  // expanded targets stay absorbing
        } else if (t < N) {
          e.trans[es][k] = {{idx(s, t + 1), 1.0}};
        } else {
          for (const auto& o : m.trans[s][k]) e.trans[es][k].push_back({idx(o.to, 1), o.prob});
        }
      }
    }
  e.initial = idx(m.initial, 1);
  e.finalize();
  TypeSet et;
  et.type_names = types.type_names;
  et.reward.assign(types.num_types(), std::vector<double>(e.sa_total, 0.0));
  for (int ty = 0; ty < types.num_types(); ++ty)
    for (int s = 0; s < n; ++s)
      for (int k = 0; k < m.num_local(s); ++k)
        et.reward[ty][e.sa_index(idx(s, N), k)] = types.reward[ty][m.sa_index(s, k)];
  et.finalize(e);
  return {e, et};
}

// Two-copy construction making target states absorbing: copy 1 keeps the
// dynamics but redirects target entries to copy 2; copy 2 is absorbing and is
// the new target set. Reach probabilities to the old targets are preserved.
inline MdpModel absorb_targets(const MdpModel& m) {
  const int n = m.num_states();
  MdpModel r;
  r.action_names = m.action_names;
  r.state_names.resize(2 * static_cast<size_t>(n));
  r.avail.resize(2 * static_cast<size_t>(n));
  r.trans.resize(2 * static_cast<size_t>(n));
  r.is_target.assign(2 * static_cast<size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    r.state_names[s] = m.state_names[s] + "#1";
    r.state_names[n + s] = m.state_names[s] + "#2";
    r.avail[s] = m.avail[s];
    r.avail[n + s] = m.avail[s];
    r.is_target[n + s] = 1;
    r.trans[s].resize(m.num_local(s));
    r.trans[n + s].resize(m.num_local(s));
    for (int k = 0; k < m.num_local(s); ++k) {
      for (const auto& o : m.trans[s][k])
        r.trans[s][k].push_back({m.is_target[o.to] ? n + o.to : o.to, o.prob});
      r.trans[n + s][k] = {{n + s, 1.0}};
    }
  }
  r.initial = m.is_target[m.initial] ? n + m.initial : m.initial;
  r.finalize();
  return r;
}

// Companion overload carrying the reward tables across the two copies.
inline std::pair<MdpModel, TypeSet> absorb_targets(const MdpModel& m, const TypeSet& types) {
  MdpModel r = absorb_targets(m);
  const int n = m.num_states();
  TypeSet rt;
  rt.type_names = types.type_names;
  rt.reward.assign(types.num_types(), std::vector<double>(r.sa_total, 0.0));
  for (int ty = 0; ty < types.num_types(); ++ty)
    for (int s = 0; s < n; ++s)
      for (int k = 0; k < m.num_local(s); ++k) {
        rt.reward[ty][r.sa_index(s, k)] = types.reward[ty][m.sa_index(s, k)];
        rt.reward[ty][r.sa_index(n + s, k)] = types.reward[ty][m.sa_index(s, k)];
      }
  rt.finalize(r);
  return {r, rt};
}

}  // namespace bmp
