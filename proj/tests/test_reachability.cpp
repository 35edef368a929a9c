#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bmp/reachability.hpp"
#include "fixtures.hpp"

using namespace bmp;

// Independent oracle: synchronous value iteration for max reach probabilities.
static std::vector<double> vi_oracle(const MdpModel& m, const StatePartition& part,
                                     int sweeps = 10000) {
  const int n = m.num_states();
  std::vector<double> p(n, 0.0), q(n, 0.0);
  for (int s = 0; s < n; ++s)
    if (part.in_target[s]) p[s] = 1.0;
  for (int it = 0; it < sweeps; ++it) {
    q = p;
    for (int s : part.live_states) {
      double best = 0.0;
      for (int k = 0; k < m.num_local(s); ++k) {
        double v = 0.0;
        for (const auto& o : m.trans[s][k]) v += o.prob * q[o.to];
        best = std::max(best, v);
      }
      p[s] = best;
    }
  }
  return p;
}

TEST_CASE("max reach on the two-state example") {
  auto [m, t] = fixtures::fig1_left();
  auto part = partition_states(m);
  auto res = max_reach(m, part);
  CHECK(res.rmax == doctest::Approx(1.0));
  CHECK(res.witness[0] == 1);  // a2
}

TEST_CASE("initial state in the dead set gives zero reach") {
  MdpModel m;
  m.state_names = {"s0", "b"};
  m.action_names = {"a"};
  m.initial = 0;
  m.avail = {{0}, {0}};
  m.trans = {{{{0, 1.0}}}, {{{1, 1.0}}}};
  m.is_target = {0, 1};
  m.finalize();
  auto part = partition_states(m);
  auto res = max_reach(m, part);
  CHECK(res.rmax == doctest::Approx(0.0));
}

TEST_CASE("max reach matches value iteration on random instances") {
  std::mt19937 rng(101);
  for (int it = 0; it < 20; ++it) {
    auto [m, t] = fixtures::random_instance(rng, 30);
    auto part = partition_states(m);
    auto res = max_reach(m, part);
    auto oracle = vi_oracle(m, part);
    for (int s = 0; s < m.num_states(); ++s)
      CHECK(std::fabs(res.p[s] - oracle[s]) <= 1e-6);
    // the witness reproduces the value through independent chain evaluation
    std::vector<double> zero(m.sa_total, 0.0);
    auto [reach, cost] = evaluate_chain(m, part, res.witness, zero);
    CHECK(std::fabs(reach - res.rmax) <= 1e-7);
    CHECK(cost == doctest::Approx(0.0));
  }
}

TEST_CASE("min cost at max reach on the two-state example") {
  auto [m, t] = fixtures::fig1_left();
  auto part = partition_states(m);
  const double eps = 0.01;
  std::vector<double> cost(m.sa_total, 0.0);
  cost[m.sa_index(0, 0)] = eps;        // a1
  cost[m.sa_index(0, 1)] = 1.0 + eps;  // a2
  auto [occ, v] = min_cost_max_reach(m, part, cost);
  CHECK(v == doctest::Approx(1.0 + eps));
  CHECK(occ.x[m.sa_index(0, 1)] == doctest::Approx(1.0));
}

TEST_CASE("zero cost gives zero value") {
  std::mt19937 rng(5);
  auto [m, t] = fixtures::random_instance(rng);
  auto part = partition_states(m);
  std::vector<double> cost(m.sa_total, 0.0);
  auto [occ, v] = min_cost_max_reach(m, part, cost);
  CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("diamond min cost matches route enumeration") {
  auto [m, t] = fixtures::diamond();
  auto part = partition_states(m);
  std::vector<double> cost(m.sa_total, 0.0);
  cost[m.sa_index(0, 1)] = 1.2;  // left
  cost[m.sa_index(0, 2)] = 0.9;  // right
  cost[m.sa_index(1, 1)] = 0.7;  // go from s1
  cost[m.sa_index(2, 1)] = 0.8;  // go from s2
  auto [occ, v] = min_cost_max_reach(m, part, cost);
  // only two probability-1 routes exist; oracle is the cheaper route total
  const double oracle = std::min(1.2 + 0.7, 0.9 + 0.8);
  CHECK(v == doctest::Approx(oracle));
}

TEST_CASE("occupancy hits the reach equality on random instances") {
  std::mt19937 rng(303);
  for (int it = 0; it < 15; ++it) {
    auto [m, t] = fixtures::random_instance(rng, 15);
    auto part = partition_states(m);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> cost(m.sa_total, 0.0);
    for (auto& c : cost) c = u(rng);
    auto res = max_reach(m, part);
    auto [occ, v] = min_cost_max_reach(m, part, cost);
    auto r = reach_reward(m, part);
    CHECK(std::fabs(occ.total(m, r) - res.rmax) <= 1e-7);
    for (double xv : occ.x) CHECK(xv >= -1e-9);
    CHECK(v >= -1e-9);
  }
}

TEST_CASE("chain evaluation reproduces the worked costs") {
  auto [m, t] = fixtures::fig1_right();
  auto part = partition_states(m);
  std::vector<double> pay(m.sa_total, 0.0);

  SUBCASE("stochastic action paid 2 costs 4 in expectation") {
    pay[m.sa_index(0, 2)] = 2.0;
    std::vector<int> pol = {2, -1};
    auto [reach, cost] = evaluate_chain(m, part, pol, pay);
    CHECK(reach == doctest::Approx(1.0));
    CHECK(cost == doctest::Approx(4.0));
  }
  SUBCASE("direct action paid 2 costs 2") {
    pay[m.sa_index(0, 1)] = 2.0;
    std::vector<int> pol = {1, -1};
    auto [reach, cost] = evaluate_chain(m, part, pol, pay);
    CHECK(reach == doctest::Approx(1.0));
    CHECK(cost == doctest::Approx(2.0));
  }
}

TEST_CASE("positive payment on a closed loop diverges") {
  auto [m, t] = fixtures::fig1_left();
  auto part = partition_states(m);
  std::vector<double> pay(m.sa_total, 0.0);
  pay[m.sa_index(0, 0)] = 0.5;  // pay on the self loop
  std::vector<int> pol = {0, -1};
  auto [reach, cost] = evaluate_chain(m, part, pol, pay);
  CHECK(reach == doctest::Approx(0.0));
  CHECK(cost == kInf);
}

TEST_CASE("unpaid closed loop has finite (zero) cost") {
  auto [m, t] = fixtures::fig1_left();
  auto part = partition_states(m);
  std::vector<double> pay(m.sa_total, 0.0);
  std::vector<int> pol = {0, -1};
  auto [reach, cost] = evaluate_chain(m, part, pol, pay);
  CHECK(reach == doctest::Approx(0.0));
  CHECK(cost == doctest::Approx(0.0));
}

TEST_CASE("chain evaluation agrees with occupancy totals on deterministic policies") {
  std::mt19937 rng(909);
  for (int it = 0; it < 10; ++it) {
    auto [m, t] = fixtures::random_instance(rng, 10);
    auto part = partition_states(m);
    // the guaranteed path policy: action 0 everywhere
    std::vector<int> pol(m.num_states(), -1);
    for (int s : part.live_states) pol[s] = m.avail[s][0];
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pay(m.sa_total, 0.0);
    for (int s : part.live_states) pay[m.sa_index(s, 0)] = u(rng);
    auto [reach, cost] = evaluate_chain(m, part, pol, pay);
    CHECK(reach == doctest::Approx(1.0));
    // oracle: the chain is the deterministic path 0 -> 1 -> ... -> n-1
    double oracle = 0.0;
    for (int s : part.live_states) oracle += pay[m.sa_index(s, 0)];
    CHECK(cost == doctest::Approx(oracle));
  }
}
