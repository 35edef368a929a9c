#pragma once
// Instance generators with known optimal values: a quantified-boolean-formula
// game, Hamiltonian-path pricing from a metric, set-cover pricing under the
// single-offer restriction, and a parametric family separating the stationary
// problem from its single-offer restriction.

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmp/mdp.hpp"

namespace bmp {

// Quantified boolean formula with n variables (n even), alternating
// quantifiers: odd indices existential, even indices universal. Clauses hold
// exactly three signed 1-based literals; duplicates are permitted.
struct QbfInstance {
  int n = 0;
  std::vector<std::array<int, 3>> clauses;
};

// A generated instance together with its decision semantics: the question the
// instance answers is "optimal worst-case cost <= threshold + eps_units * eps"
// (plus a tiny numerical slack), where eps is the strictness margin used when
// solving.
struct ReductionOutput {
  MdpModel model;
  TypeSet types;
  double threshold = 0.0;
  double eps_units = 0.0;
  std::string meaning;
};

namespace detail {

inline void check_generated(const MdpModel& m, const TypeSet& t, const char* where) {
  auto rep = validate(m, t);
  if (!rep.ok)
    throw std::logic_error(std::string(where) + ": generated model fails validation: " +
                           rep.violations.front());
}

}  // namespace detail

// Gadget MDP whose cheapest schedule decides the non-adaptive evaluation of
// the formula (choose all odd variables up front, then all even variables are
// drawn uniformly at random): per variable layer a chooser state on each of
// two tracks plus true/false relay states; one type per clause. A type leaves
// the lower track at the first layer whose assigned literal satisfies its
// clause; a clause that some random branch never satisfies strands that type
// in the dead sink, which forces an unaffordable preference reversal.
inline ReductionOutput qsat_to_bmp(const QbfInstance& qbf) {
  const int n = qbf.n;
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("qsat_to_bmp: variable count must be even and positive");
  if (qbf.clauses.empty()) throw std::invalid_argument("qsat_to_bmp: clause set is empty");
  for (const auto& c : qbf.clauses)
    for (int lit : c)
      if (lit == 0 || std::abs(lit) > n)
        throw std::invalid_argument("qsat_to_bmp: literal index out of range");

  // Layer i in [1, n] occupies indices 6(i-1)..6(i-1)+5 in the order
  // A_i, A_i', T_i, T_i', F_i, F_i'; the two absorbing states come last.
  auto A = [](int i) { return 6 * (i - 1); };
  auto Ap = [](int i) { return 6 * (i - 1) + 1; };
  auto T = [](int i) { return 6 * (i - 1) + 2; };
  auto Tp = [](int i) { return 6 * (i - 1) + 3; };
  auto F = [](int i) { return 6 * (i - 1) + 4; };
  auto Fp = [](int i) { return 6 * (i - 1) + 5; };
  const int goal = 6 * n;       // A_{n+1}
  const int sink = 6 * n + 1;   // A_{n+1}'

  MdpModel m;
  m.action_names = {"a0", "a1", "a2", "a3", "a4", "a5"};
  m.state_names.resize(6 * n + 2);
  m.avail.resize(6 * n + 2);
  m.trans.resize(6 * n + 2);
  m.is_target.assign(6 * n + 2, 0);
  for (int i = 1; i <= n; ++i) {
    const std::string tag = std::to_string(i);
    m.state_names[A(i)] = "A" + tag;
    m.state_names[Ap(i)] = "A" + tag + "'";
    m.state_names[T(i)] = "T" + tag;
    m.state_names[Tp(i)] = "T" + tag + "'";
    m.state_names[F(i)] = "F" + tag;
    m.state_names[Fp(i)] = "F" + tag + "'";
    const int nextA = (i == n) ? goal : A(i + 1);
    const int nextAp = (i == n) ? sink : Ap(i + 1);
    if (i % 2 == 1) {  // existential layer: the principal picks the branch
      m.avail[A(i)] = {0, 1, 2};
      m.trans[A(i)] = {{{A(i), 1.0}}, {{T(i), 1.0}}, {{F(i), 1.0}}};
      m.avail[Ap(i)] = {0, 1, 2};
      m.trans[Ap(i)] = {{{Ap(i), 1.0}}, {{Tp(i), 1.0}}, {{Fp(i), 1.0}}};
    } else {  // universal layer: a fair coin picks the branch
      m.avail[A(i)] = {5};
      m.trans[A(i)] = {{{T(i), 0.5}, {F(i), 0.5}}};
      m.avail[Ap(i)] = {5};
      m.trans[Ap(i)] = {{{Tp(i), 0.5}, {Fp(i), 0.5}}};
    }
    m.avail[T(i)] = {3};
    m.trans[T(i)] = {{{nextA, 1.0}}};
    m.avail[F(i)] = {4};
    m.trans[F(i)] = {{{nextA, 1.0}}};
    m.avail[Tp(i)] = {3, 4};  // a3 stays on the lower track, a4 leaves it
    m.trans[Tp(i)] = {{{nextAp, 1.0}}, {{nextA, 1.0}}};
    m.avail[Fp(i)] = {3, 4};
    m.trans[Fp(i)] = {{{nextAp, 1.0}}, {{nextA, 1.0}}};
  }
  m.state_names[goal] = "A" + std::to_string(n + 1);
  m.state_names[sink] = "A" + std::to_string(n + 1) + "'";
  m.avail[goal] = {0};
  m.trans[goal] = {{{goal, 1.0}}};
  m.is_target[goal] = 1;
  m.avail[sink] = {0};
  m.trans[sink] = {{{sink, 1.0}}};
  m.initial = Ap(1);
  m.finalize();

  TypeSet t;
  const double big = n + 1.0;
  t.reward.assign(qbf.clauses.size(), std::vector<double>(m.sa_total, 0.0));
  for (size_t k = 0; k < qbf.clauses.size(); ++k) {
    t.type_names.push_back("theta" + std::to_string(k + 1));
    auto& r = t.reward[k];
    for (int i = 1; i <= n; ++i) {
      bool pos = false, neg = false;
      for (int lit : qbf.clauses[k]) {
        if (lit == i) pos = true;
        if (lit == -i) neg = true;
      }
      if (i % 2 == 1) {
        r[m.sa_index(A(i), 1)] = -1.0;
        r[m.sa_index(A(i), 2)] = -1.0;
        r[m.sa_index(Ap(i), 1)] = -1.0;
        r[m.sa_index(Ap(i), 2)] = -1.0;
      }
      // setting the variable true satisfies the clause -> the type prefers to
      // leave the lower track at T_i'; symmetric at F_i'; otherwise it
      // prefers to stay
      r[m.sa_index(Tp(i), pos ? 1 : 0)] = big;
      r[m.sa_index(Fp(i), neg ? 1 : 0)] = big;
    }
  }
  t.finalize(m);
  detail::check_generated(m, t, "qsat_to_bmp");

  ReductionOutput out;
  out.model = std::move(m);
  out.types = std::move(t);
  out.threshold = n / 2.0;
  out.eps_units = n / 2.0;
  out.meaning =
      "worst-case cost <= threshold + eps_units*eps iff the formula "
      "(exists odd vars)(forall even vars) AND-of-clauses is true";
  return out;
}

// City MDP: one state per city, one action per city (a_k jumps to city k),
// one type per non-final city. Reaching the final city cheaply for every type
// requires threading all cities along a single Hamiltonian path.
inline ReductionOutput tsp_to_nbmp(const std::vector<std::vector<double>>& c, double K) {
  const int N = static_cast<int>(c.size());
  if (N < 2) throw std::invalid_argument("tsp_to_nbmp: need at least two cities");
  double max_c = 0.0;
  for (int i = 0; i < N; ++i) {
    if (static_cast<int>(c[i].size()) != N)
      throw std::invalid_argument("tsp_to_nbmp: distance matrix is not square");
    if (std::fabs(c[i][i]) > 1e-12)
      throw std::invalid_argument("tsp_to_nbmp: nonzero diagonal entry");
    for (int j = 0; j < N; ++j) {
      if (c[i][j] < 0.0) throw std::invalid_argument("tsp_to_nbmp: negative distance");
      if (std::fabs(c[i][j] - c[j][i]) > 1e-9)
        throw std::invalid_argument("tsp_to_nbmp: distance matrix is not symmetric");
      max_c = std::max(max_c, c[i][j]);
      for (int k = 0; k < N; ++k)
        if (c[i][j] + c[j][k] < c[i][k] - 1e-9)
          throw std::invalid_argument("tsp_to_nbmp: triangle inequality violated");
    }
  }
  if (K + 1.0 <= max_c)
    throw std::invalid_argument("tsp_to_nbmp: penalty constant K+1 must exceed every distance");

  MdpModel m;
  for (int i = 0; i < N; ++i) {
    m.state_names.push_back("q" + std::to_string(i + 1));
    m.action_names.push_back("a" + std::to_string(i + 1));
  }
  m.initial = 0;
  m.is_target.assign(N, 0);
  m.is_target[N - 1] = 1;
  m.avail.resize(N);
  m.trans.resize(N);
  for (int s = 0; s + 1 < N; ++s) {
    for (int a = 0; a < N; ++a) {
      m.avail[s].push_back(a);
      m.trans[s].push_back({{a, 1.0}});
    }
  }
  m.avail[N - 1] = {N - 1};
  m.trans[N - 1] = {{{N - 1, 1.0}}};
  m.finalize();

  TypeSet t;
  t.reward.assign(N - 1, std::vector<double>(m.sa_total, 0.0));
  for (int i = 0; i < N - 1; ++i) {
    t.type_names.push_back("theta" + std::to_string(i + 1));
    for (int j = 0; j + 1 < N; ++j)
      for (int k = 0; k < N; ++k) {
        double r;
        if (j == k)
          r = 0.0;
        else if (j == i)
          r = -c[j][k];  // from its own city the type can afford the exit
        else if (k == N - 1)
          r = -(K + 1.0);  // exiting from a foreign city is prohibitive
        else
          r = -c[j][k];
        t.reward[i][m.sa_index(j, k)] = r;
      }
  }
  t.finalize(m);
  detail::check_generated(m, t, "tsp_to_nbmp");

  ReductionOutput out;
  out.model = std::move(m);
  out.types = std::move(t);
  out.threshold = K;
  out.eps_units = static_cast<double>(N);
  out.meaning =
      "worst-case cost <= threshold + eps_units*eps iff a Hamiltonian path "
      "from city 1 to city N of length <= threshold exists";
  return out;
}

// Chain MDP with a detour to the target at every step: under the single-offer
// restriction the principal picks one subset per chain state, and every
// element type must be caught by some picked subset before the chain runs
// into the dead sink.
inline ReductionOutput setcover_to_nsbmp(int universe, const std::vector<std::vector<int>>& subsets,
                                         int budget) {
  const int N = universe;
  const int K = static_cast<int>(subsets.size());
  const int M = budget;
  if (N < 1) throw std::invalid_argument("setcover_to_nsbmp: empty universe");
  if (M < 1 || M > K)
    throw std::invalid_argument("setcover_to_nsbmp: budget must be in [1, subset count]");
  std::vector<char> covered(N + 1, 0);
  for (const auto& sub : subsets)
    for (int e : sub) {
      if (e < 1 || e > N) throw std::invalid_argument("setcover_to_nsbmp: element out of range");
      covered[e] = 1;
    }
  for (int e = 1; e <= N; ++e)
    if (!covered[e])
      throw std::invalid_argument("setcover_to_nsbmp: subsets do not cover the universe");

  MdpModel m;
  for (int a = 0; a <= K; ++a) m.action_names.push_back("a" + std::to_string(a));
  for (int s = 0; s < M + 2; ++s) m.state_names.push_back("q" + std::to_string(s + 1));
  m.initial = 0;
  m.is_target.assign(M + 2, 0);
  m.is_target[M] = 1;  // q_{M+1}
  m.avail.resize(M + 2);
  m.trans.resize(M + 2);
  for (int s = 0; s < M; ++s) {
    m.avail[s].push_back(0);
    m.trans[s].push_back({{s + 1 < M ? s + 1 : M + 1, 1.0}});
    for (int j = 1; j <= K; ++j) {
      m.avail[s].push_back(j);
      m.trans[s].push_back({{M, 1.0}});
    }
  }
  m.avail[M] = {0};
  m.trans[M] = {{{M, 1.0}}};
  m.avail[M + 1] = {0};
  m.trans[M + 1] = {{{M + 1, 1.0}}};
  m.finalize();

  TypeSet t;
  t.reward.assign(N, std::vector<double>(m.sa_total, 0.0));
  for (int e = 1; e <= N; ++e) {
    t.type_names.push_back("theta" + std::to_string(e));
    for (int s = 0; s < M; ++s)
      for (int j = 1; j <= K; ++j) {
        bool member = false;
        for (int el : subsets[j - 1]) member = member || el == e;
        t.reward[e - 1][m.sa_index(s, j)] = member ? -0.5 : -(K + 1.0);
      }
  }
  t.finalize(m);
  detail::check_generated(m, t, "setcover_to_nsbmp");

  ReductionOutput out;
  out.model = std::move(m);
  out.types = std::move(t);
  out.threshold = M;
  out.eps_units = 0.0;
  out.meaning =
      "single-offer worst-case cost <= threshold iff a cover of size <= "
      "threshold exists";
  return out;
}

// Four-state, two-type family: the stationary optimum is 2+2eps regardless of
// x, while the single-offer optimum is 2-x+2eps, so their ratio grows without
// bound as x -> -infinity. Requires x < -1; the closed forms need the margin
// eps < (-1-x)/2.
inline ReductionOutput gap_example(double x) {
  if (!(x < -1.0)) throw std::invalid_argument("gap_example: parameter must be below -1");
  MdpModel m;
  m.state_names = {"s1", "s2", "s3", "s4"};
  m.action_names = {"a1", "a2", "a3"};
  m.initial = 0;
  m.avail = {{0, 1, 2}, {0, 1}, {0, 1}, {0}};
  m.trans = {{{{0, 1.0}}, {{1, 1.0}}, {{2, 1.0}}},
             {{{1, 1.0}}, {{3, 1.0}}},
             {{{2, 1.0}}, {{3, 1.0}}},
             {{{3, 1.0}}}};
  m.is_target = {0, 0, 0, 1};
  m.finalize();

  TypeSet t;
  t.type_names = {"theta1", "theta2"};
  t.reward = {{0.0, -1.0, -2.0, 0.0, -1.0, 0.0, x, 0.0},
              {0.0, -2.0, -1.0, 0.0, x, 0.0, -1.0, 0.0}};
  t.finalize(m);
  detail::check_generated(m, t, "gap_example");

  ReductionOutput out;
  out.model = std::move(m);
  out.types = std::move(t);
  out.threshold = 2.0;
  out.eps_units = 2.0;
  out.meaning =
      "stationary optimum 2+2*eps; single-offer optimum 2-x+2*eps; valid for "
      "eps < (-1-x)/2";
  return out;
}

}  // namespace bmp
