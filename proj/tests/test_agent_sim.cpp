#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bmp/agent_sim.hpp"
#include "fixtures.hpp"

using namespace bmp;

namespace {

// Brute-force oracle: enumerate every deterministic policy restricted to the
// optimal-action sets and evaluate it exactly.
struct BruteOutcome {
  double min_reach = 1.0;
  double max_cost = 0.0;
  bool any = false;
};

BruteOutcome brute_force(const MdpModel& m, const StatePartition& part, const BestResponse& br,
                         const IncentiveSchedule& sched, double rmax) {
  BruteOutcome out;
  const auto& live = part.live_states;
  std::vector<size_t> choice(live.size(), 0);
  while (true) {
    std::vector<int> pol(m.num_states(), -1);
    for (size_t i = 0; i < live.size(); ++i)
      pol[live[i]] = m.avail[live[i]][br.optimal[live[i]][choice[i]]];
    auto [reach, cost] = evaluate_chain(m, part, pol, sched.offers);
    out.any = true;
    out.min_reach = std::min(out.min_reach, reach);
    if (reach >= rmax - 1e-7) out.max_cost = std::max(out.max_cost, cost);
    size_t i = 0;
    while (i < live.size() && ++choice[i] >= br.optimal[live[i]].size()) choice[i++] = 0;
    if (i == live.size()) break;
  }
  return out;
}

}  // namespace

TEST_CASE("exact tie produces a two-action set; strict margin is unique") {
  auto [m, t] = fixtures::fig1_left();
  auto part = partition_states(m);
  auto sched = IncentiveSchedule::zero(m);
  sched.offers[m.sa_index(0, 1)] = 1.0;
  auto br = best_response(m, t, 0, part, sched);
  REQUIRE(br.optimal[0].size() == 2);
  CHECK_FALSE(br.unique[0]);

  sched.offers[m.sa_index(0, 1)] = 1.01;
  auto br2 = best_response(m, t, 0, part, sched);
  REQUIRE(br2.optimal[0].size() == 1);
  CHECK(br2.optimal[0][0] == 1);
  CHECK(br2.unique[0]);
}

TEST_CASE("zero offers reproduce the unincentivized argmax") {
  std::mt19937 rng(42);
  auto [m, t] = fixtures::random_instance(rng);
  auto part = partition_states(m);
  auto sched = IncentiveSchedule::zero(m);
  auto br = best_response(m, t, 0, part, sched);
  for (int s : part.live_states) {
    double best = -kInf;
    for (int k = 0; k < m.num_local(s); ++k)
      best = std::max(best, t.reward[0][m.sa_index(s, k)]);
    for (int k : br.optimal[s]) CHECK(t.reward[0][m.sa_index(s, k)] >= best - br.tie_tol);
  }
}

TEST_CASE("tied pair is adversarially infeasible; epsilon margin flips it") {
  auto [m, t] = fixtures::fig1_left();
  auto part = partition_states(m);
  auto sched = IncentiveSchedule::zero(m);
  sched.offers[m.sa_index(0, 1)] = 1.0;
  auto br = best_response(m, t, 0, part, sched);
  auto oc = adversarial_outcome(m, part, br, sched, 1.0);
  CHECK_FALSE(oc.feasible);
  CHECK(oc.reach == doctest::Approx(0.0));
  CHECK(oc.policy[0] == 0);  // the adversary stays

  sched.offers[m.sa_index(0, 1)] = 1.0 + 0.01;
  auto br2 = best_response(m, t, 0, part, sched);
  auto oc2 = adversarial_outcome(m, part, br2, sched, 1.0);
  CHECK(oc2.feasible);
  CHECK(oc2.cost == doctest::Approx(1.01));
}

TEST_CASE("adversary prefers the expensive stochastic route") {
  auto [m, t] = fixtures::fig1_right();
  auto part = partition_states(m);
  auto sched = IncentiveSchedule::zero(m);
  sched.offers[m.sa_index(0, 1)] = 2.0;  // a2
  sched.offers[m.sa_index(0, 2)] = 2.0;  // a3
  auto br = best_response(m, t, 0, part, sched);
  REQUIRE(br.optimal[0].size() == 2);
  auto oc = adversarial_outcome(m, part, br, sched, 1.0);
  CHECK(oc.feasible);
  CHECK(oc.cost == doctest::Approx(4.0));
  CHECK(oc.policy[0] == 2);  // a3
}

TEST_CASE("all-zero schedule on the two-state example is infeasible") {
  auto [m, t] = fixtures::fig1_left();
  auto part = partition_states(m);
  auto rep = verify_schedule(m, t, part, IncentiveSchedule::zero(m));
  CHECK_FALSE(rep.feasible);
  CHECK(rep.worst_case_cost == kInf);
}

TEST_CASE("monotonicity: raising a uniquely optimal offer keeps responses fixed") {
  std::mt19937 rng(77);
  for (int it = 0; it < 10; ++it) {
    auto [m, t] = fixtures::random_instance(rng, 8, 2);
    auto part = partition_states(m);
    auto sched = IncentiveSchedule::zero(m);
    // make action 0 uniquely optimal everywhere for every type
    for (int s : part.live_states) {
      double need = 0.0;
      for (int theta = 0; theta < t.num_types(); ++theta)
        for (int k = 0; k < m.num_local(s); ++k)
          need = std::max(need, t.reward[theta][m.sa_index(s, k)] -
                                    t.reward[theta][m.sa_index(s, 0)]);
      sched.offers[m.sa_index(s, 0)] = need + 0.05;
    }
    for (int theta = 0; theta < t.num_types(); ++theta) {
      auto br = best_response(m, t, theta, part, sched);
      auto bumped = sched;
      for (int s : part.live_states) bumped.offers[m.sa_index(s, 0)] += 0.5;
      auto br2 = best_response(m, t, theta, part, bumped);
      for (int s : part.live_states) {
        CHECK(br.optimal[s] == br2.optimal[s]);
        CHECK(br.unique[s]);
      }
    }
  }
}

TEST_CASE("adversarial outcome matches brute-force policy enumeration") {
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int it = 0; it < 40; ++it) {
    auto [m, t] = fixtures::random_instance(rng, 6, 2);
    auto part = partition_states(m);
    auto reach = max_reach(m, part);
    auto sched = IncentiveSchedule::zero(m);
    for (int s : part.live_states)
      for (int k = 0; k < m.num_local(s); ++k)
        if (u(rng) < 0.5) sched.offers[m.sa_index(s, k)] = 2.5 * u(rng);
    for (int theta = 0; theta < t.num_types(); ++theta) {
      auto br = best_response(m, t, theta, part, sched);
      // keep the enumeration small
      size_t combos = 1;
      for (int s : part.live_states) combos *= br.optimal[s].size();
      if (combos > 4096) continue;
      auto oracle = brute_force(m, part, br, sched, reach.rmax);
      auto oc = adversarial_outcome(m, part, br, sched, reach.rmax);
      ++checked;
      if (oracle.min_reach < reach.rmax - 1e-7) {
        CHECK_FALSE(oc.feasible);
        CHECK(std::fabs(oc.reach - oracle.min_reach) <= 1e-6);
      } else {
        REQUIRE(oc.feasible);
        if (oracle.max_cost == kInf) {
          CHECK(oc.cost == kInf);
        } else {
          CHECK(std::fabs(oc.cost - oracle.max_cost) <= 1e-6 * (1.0 + oracle.max_cost));
        }
      }
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("unique responses make the phase-one minimum equal R_max") {
  std::mt19937 rng(999);
  for (int it = 0; it < 10; ++it) {
    auto [m, t] = fixtures::random_instance(rng, 8, 1);
    auto part = partition_states(m);
    auto reach = max_reach(m, part);
    // incentivize the max-reach witness uniquely
    auto sched = IncentiveSchedule::zero(m);
    for (int s : part.live_states) {
      const int kw = m.local_of(s, reach.witness[s]);
      double need = 0.0;
      for (int k = 0; k < m.num_local(s); ++k)
        need = std::max(need, t.reward[0][m.sa_index(s, k)] -
                                  t.reward[0][m.sa_index(s, kw)]);
      sched.offers[m.sa_index(s, kw)] = need + 0.05;
    }
    auto rep = verify_schedule(m, t, part, sched);
    REQUIRE(rep.feasible);
    CHECK(std::fabs(rep.per_type[0].reach - reach.rmax) <= 1e-7);
  }
}
