#pragma once
// Bounded-variable revised primal simplex with a dense explicit basis inverse.
//
// - Composite phase 1: minimizes the sum of basic-variable bound violations,
//   so no artificial columns are needed and any basis (e.g. a warm start from
//   a parent branch-and-bound node or a cut loop) is a legal starting point.
// - Dantzig pricing with a Bland's-rule fallback after a fixed budget of
//   degenerate pivots, guaranteeing termination.
// - Certificates: row duals and a certified duality gap at optimality, a
//   Farkas-style row certificate on infeasibility, an improving ray on
//   unboundedness.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bmp/linprog.hpp"

namespace bmp {

class SimplexSolver {
 public:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kZeroTol = 1e-11;

  explicit SimplexSolver(const LinearProgram& lp) {
    lp.check_well_formed();
    n_ = lp.num_vars;
    m_ = 0;
    lo_ = lp.lo;
    up_ = lp.up;
    cost_ = lp.obj;
    cols_.assign(n_, {});
    for (const auto& r : lp.rows) add_row(r.coef, r.rel, r.rhs);
    reset_basis_all_slack();
  }

  int num_rows() const { return m_; }
  int num_structural() const { return n_; }

  void set_var_bounds(int j, double lo, double up) {
    lo_[j] = lo;
    up_[j] = up;
    normalize_nonbasic(j);
  }
  void set_objective(int j, double c) { cost_[j] = c; }
  double var_lo(int j) const { return lo_[j]; }
  double var_up(int j) const { return up_[j]; }

  // Appends a row; its slack enters the basis (warm-start friendly).
  int add_row(const std::vector<RowEntry>& coef, Rel rel, double rhs) {
    const int i = m_;
    rows_.push_back(coef);
    rhs_.push_back(rhs);
    for (const auto& e : coef) cols_[e.col].push_back({i, e.coef});
    // slack variable
    double slo = 0.0, sup = 0.0;
    if (rel == Rel::LE) sup = kInf;
    if (rel == Rel::GE) slo = -kInf;
    lo_.push_back(slo);
    up_.push_back(sup);
    cost_.push_back(0.0);
    ++m_;
    if (basis_valid_) {
      // B_new = [[B, 0], [a_B, 1]]  =>  new inverse row = -a_B * Binv.
      std::vector<double> newrow(m_, 0.0);
      newrow[i] = 1.0;
      for (const auto& e : coef) {
        const int st = stat_[e.col];
        if (st >= 0) {  // basic at position st
          const double c = e.coef;
          const double* br = binv_old_row(st);
          for (int k = 0; k < m_ - 1; ++k) newrow[k] -= c * br[k];
        }
      }
      grow_binv(newrow);
      basic_.push_back(n_ + i);
      stat_.push_back(i);  // basic at new position
    } else {
      stat_.push_back(kNbLower);
    }
    return i;
  }

  struct Basis {
    std::vector<int> basic;
    std::vector<int8_t> nb_stat;  // for nonbasic vars: 0 lower, 1 upper, 2 free
  };

  Basis save_basis() const {
    Basis b;
    b.basic = basic_;
    b.nb_stat.assign(n_ + m_, 0);
    for (int j = 0; j < n_ + m_; ++j) {
      if (stat_[j] == kNbUpper) b.nb_stat[j] = 1;
      if (stat_[j] == kNbFree) b.nb_stat[j] = 2;
    }
    return b;
  }

  void load_basis(const Basis& b) {
    if (static_cast<int>(b.basic.size()) > m_) {
      reset_basis_all_slack();
      return;
    }
    stat_.assign(n_ + m_, kNbLower);
    for (int j = 0; j < n_ + m_ && j < static_cast<int>(b.nb_stat.size()); ++j) {
      if (b.nb_stat[j] == 1) stat_[j] = kNbUpper;
      if (b.nb_stat[j] == 2) stat_[j] = kNbFree;
    }
    basic_.clear();
    std::vector<char> used(n_ + m_, 0);
    for (int v : b.basic)
      if (v < n_ + m_ && !used[v]) {
        basic_.push_back(v);
        used[v] = 1;
      }
    // rows added after the snapshot keep their slacks basic
    for (int i = 0; i < m_ && static_cast<int>(basic_.size()) < m_; ++i)
      if (!used[n_ + i]) {
        basic_.push_back(n_ + i);
        used[n_ + i] = 1;
      }
    for (int p = 0; p < m_; ++p) stat_[basic_[p]] = p;
    for (int j = 0; j < n_ + m_; ++j)
      if (stat_[j] < 0) normalize_nonbasic(j);
    factorize();
  }

  SolveStatus solve(long iter_limit = -1) {
    if (iter_limit < 0) iter_limit = 200000L + 200L * (m_ + n_);
    if (!basis_valid_) factorize();
    compute_basic_values();
    SolveStatus st;
    const long bland_after = 10L * (m_ + n_ + m_);  // 10*(rows+cols), cols incl. slacks
    long degen = 0;
    bool bland = false;
    std::vector<double> y(m_), w(m_);
    long it = 0;
    int since_check = 0;
    for (;; ++it) {
      if (it >= iter_limit) {
        st.result = SolveResult::IterationLimit;
        st.iterations = it;
        fill_primal(st);
        return st;
      }
      if (++since_check >= 400) {
        since_check = 0;
        if (!accuracy_ok()) {
          factorize();
          compute_basic_values();
        }
      }
      // ---- phase detection & pricing vector
      double infeas_sum = 0.0;
      bool phase1 = false;
      for (int p = 0; p < m_; ++p) {
        const int v = basic_[p];
        const double x = xb_[p];
        if (x < lo_[v] - ftol(v)) {
          infeas_sum += lo_[v] - x;
          phase1 = true;
        } else if (x > up_[v] + ftol(v)) {
          infeas_sum += x - up_[v];
          phase1 = true;
        }
      }
      // y = Binv^T d_B
      {
        std::vector<double> d(m_, 0.0);
        for (int p = 0; p < m_; ++p) {
          const int v = basic_[p];
          if (phase1) {
            if (xb_[p] < lo_[v] - ftol(v))
              d[p] = -1.0;
            else if (xb_[p] > up_[v] + ftol(v))
              d[p] = 1.0;
          } else {
            d[p] = cost_[v];
          }
        }
        for (int k = 0; k < m_; ++k) y[k] = 0.0;
        for (int p = 0; p < m_; ++p) {
          const double dp = d[p];
          if (dp == 0.0) continue;
          const double* br = &binv_[static_cast<size_t>(p) * m_];
          for (int k = 0; k < m_; ++k) y[k] += dp * br[k];
        }
      }
      // ---- entering variable
      int enter = -1, dir = 0;
      double best = kPivotTol * 10;
      for (int j = 0; j < n_ + m_; ++j) {
        const int s = stat_[j];
        if (s >= 0) continue;  // basic
        const double rj = (phase1 ? 0.0 : cost_[j]) - dot_col(j, y);
        int d = 0;
        if (s == kNbLower && rj < -kPivotTol * 10) d = 1;
        else if (s == kNbUpper && rj > kPivotTol * 10) d = -1;
        else if (s == kNbFree) {
          if (rj < -kPivotTol * 10) d = 1;
          else if (rj > kPivotTol * 10) d = -1;
        }
        if (d == 0) continue;
        if (bland) {
          enter = j;
          dir = d;
          break;
        }
        if (std::fabs(rj) > best) {
          best = std::fabs(rj);
          enter = j;
          dir = d;
        }
      }
      if (enter < 0) {
        st.iterations = it;
        if (phase1) {
          st.result = SolveResult::Infeasible;
          st.farkas = y;  // convention: y^T b > sup over box of y^T(A x + s)
          // make the certificate orientation canonical: positive violation
          fill_primal(st);
          return st;
        }
        st.result = SolveResult::Optimal;
        fill_primal(st);
        st.duals = y;
        st.gap = duality_gap(y, st.objective);
        return st;
      }
      // ---- direction w = Binv * A_enter
      col_times_binv(enter, w);
      // basic change per unit step: delta_p = -dir * w[p]
      // ---- ratio test
      double t = kInf;
      int leave = -1;        // basis position
      int leave_bound = 0;   // 0 -> lower, 1 -> upper
      double own = kInf;
      if (stat_[enter] == kNbLower && up_[enter] < kInf) own = up_[enter] - lo_[enter];
      if (stat_[enter] == kNbUpper && lo_[enter] > -kInf) own = up_[enter] - lo_[enter];
      t = own;
      for (int p = 0; p < m_; ++p) {
        const double dl = -dir * w[p];
        if (std::fabs(dl) <= kPivotTol) continue;
        const int v = basic_[p];
        const double x = xb_[p];
        double cand = kInf;
        int cb = 0;
        if (x < lo_[v] - ftol(v)) {
          // infeasible below: blocks when moving up through its lower bound
          if (dl > 0) {
            cand = (lo_[v] - x) / dl;
            cb = 0;
          }
        } else if (x > up_[v] + ftol(v)) {
          if (dl < 0) {
            cand = (up_[v] - x) / dl;
            cb = 1;
          }
        } else {
          if (dl < 0 && lo_[v] > -kInf) {
            cand = (lo_[v] - x) / dl;
            cb = 0;
          } else if (dl > 0 && up_[v] < kInf) {
            cand = (up_[v] - x) / dl;
            cb = 1;
          }
        }
        if (cand < -1e-12) cand = 0.0;
        if (cand < t - 1e-12 ||
            (cand < t + 1e-12 && leave >= 0 &&
             (bland ? basic_[p] < basic_[leave] : std::fabs(w[p]) > std::fabs(w[leave])))) {
          t = cand;
          leave = p;
          leave_bound = cb;
        }
      }
      if (t == kInf) {
        st.iterations = it;
        if (phase1) {  // cannot happen for consistent data; treat as numerical
          st.result = SolveResult::Infeasible;
          st.farkas = y;
          fill_primal(st);
          return st;
        }
        st.result = SolveResult::Unbounded;
        fill_primal(st);
        st.ray.assign(n_, 0.0);
        if (enter < n_) st.ray[enter] = dir;
        for (int p = 0; p < m_; ++p)
          if (basic_[p] < n_) st.ray[basic_[p]] = -dir * w[p];
        return st;
      }
      if (t < 0) t = 0;
      if (t <= 1e-10) {
        if (++degen > bland_after) bland = true;
      } else {
        degen = 0;
      }
      // ---- apply step
      const double step = dir * t;
      if (leave < 0) {
        // bound flip of the entering variable
        for (int p = 0; p < m_; ++p) xb_[p] -= step * w[p];
        stat_[enter] = (stat_[enter] == kNbLower) ? kNbUpper : kNbLower;
        continue;
      }
      const int leaving_var = basic_[leave];
      for (int p = 0; p < m_; ++p)
        if (p != leave) xb_[p] -= step * w[p];
      const double enter_val = nb_value(enter) + step;
      // update Binv
      {
        const double inv = 1.0 / w[leave];
        double* rr = &binv_[static_cast<size_t>(leave) * m_];
        for (int k = 0; k < m_; ++k) rr[k] *= inv;
        for (int p = 0; p < m_; ++p) {
          if (p == leave) continue;
          const double f = w[p];
          if (std::fabs(f) <= kZeroTol) continue;
          double* pr = &binv_[static_cast<size_t>(p) * m_];
          for (int k = 0; k < m_; ++k) pr[k] -= f * rr[k];
        }
      }
      basic_[leave] = enter;
      stat_[enter] = leave;
      stat_[leaving_var] = (leave_bound == 0) ? kNbLower : kNbUpper;
      if (leave_bound == 0 && lo_[leaving_var] == -kInf) stat_[leaving_var] = kNbFree;
      if (leave_bound == 1 && up_[leaving_var] == kInf) stat_[leaving_var] = kNbFree;
      xb_[leave] = enter_val;
      if (++pivots_since_factor_ >= 1500) {
        factorize();
        compute_basic_values();
      }
    }
  }

  // Structural part of the current point (valid after solve()).
  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      if (stat_[j] < 0) x[j] = nb_value(j);
    for (int p = 0; p < m_; ++p)
      if (basic_[p] < n_) x[basic_[p]] = xb_[p];
    return x;
  }

  double rhs(int i) const { return rhs_[i]; }
  void set_rhs(int i, double v) { rhs_[i] = v; }

 private:
  static constexpr int kNbLower = -1;
  static constexpr int kNbUpper = -2;
  static constexpr int kNbFree = -3;

  int n_ = 0, m_ = 0;
  std::vector<std::vector<RowEntry>> rows_;           // row-wise structural coefs
  std::vector<std::vector<RowEntry>> cols_;           // col-wise (row, coef), structural only
  std::vector<double> rhs_;
  std::vector<double> lo_, up_, cost_;                // length n_ + m_ (slacks appended)
  // stat_[j]: >=0 basis position; kNbLower/kNbUpper/kNbFree otherwise
  std::vector<int> stat_;
  std::vector<int> basic_;                            // basis position -> var
  std::vector<double> binv_;                          // dense m x m, row-major
  std::vector<double> xb_;                            // basic values
  bool basis_valid_ = false;
  int pivots_since_factor_ = 0;

  // Relative feasibility tolerance for comparing a value against var v's bounds.
  double ftol(int v) const {
    double s = 1.0;
    if (lo_[v] > -kInf) s = std::max(s, std::fabs(lo_[v]));
    if (up_[v] < kInf) s = std::max(s, std::fabs(up_[v]));
    return kFeasTol * s;
  }

  const double* binv_old_row(int p) const { return &binv_[static_cast<size_t>(p) * (m_ - 1)]; }

  void grow_binv(const std::vector<double>& newrow) {
    // old binv is (m_-1)x(m_-1); embed into m_ x m_ with the extra row/col.
    std::vector<double> nb(static_cast<size_t>(m_) * m_, 0.0);
    for (int p = 0; p < m_ - 1; ++p) {
      const double* src = &binv_[static_cast<size_t>(p) * (m_ - 1)];
      double* dst = &nb[static_cast<size_t>(p) * m_];
      for (int k = 0; k < m_ - 1; ++k) dst[k] = src[k];
    }
    double* last = &nb[static_cast<size_t>(m_ - 1) * m_];
    for (int k = 0; k < m_; ++k) last[k] = newrow[k];
    binv_.swap(nb);
    xb_.push_back(0.0);
  }

  double nb_value(int j) const {
    if (stat_[j] == kNbLower) return lo_[j];
    if (stat_[j] == kNbUpper) return up_[j];
    return 0.0;
  }

  void normalize_nonbasic(int j) {
    if (stat_[j] >= 0) return;
    if (stat_[j] == kNbLower && lo_[j] == -kInf)
      stat_[j] = (up_[j] < kInf) ? kNbUpper : kNbFree;
    else if (stat_[j] == kNbUpper && up_[j] == kInf)
      stat_[j] = (lo_[j] > -kInf) ? kNbLower : kNbFree;
    else if (stat_[j] == kNbFree && lo_[j] > -kInf)
      stat_[j] = kNbLower;
  }

  void reset_basis_all_slack() {
    stat_.assign(n_ + m_, kNbLower);
    for (int j = 0; j < n_ + m_; ++j) {
      stat_[j] = kNbLower;
      normalize_nonbasic(j);
    }
    basic_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      stat_[n_ + i] = i;
    }
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;
    xb_.assign(m_, 0.0);
    basis_valid_ = true;
    pivots_since_factor_ = 0;
  }

  // Rebuild the inverse from scratch; repairs rank-deficient bases by leaving
  // slack variables basic in uncovered rows.
  void factorize() {
    std::vector<int> desired;
    desired.reserve(m_);
    if (static_cast<int>(basic_.size()) == m_) desired = basic_;
    std::vector<char> want_slack(m_, 0);
    std::vector<int> structs;
    for (int v : desired) {
      if (v >= n_)
        want_slack[v - n_] = 1;
      else
        structs.push_back(v);
    }
    // start from the identity (all-slack) basis
    for (int j = 0; j < n_ + m_; ++j)
      if (stat_[j] >= 0) stat_[j] = kNbLower;
    basic_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      stat_[n_ + i] = i;
    }
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;
    std::vector<char> row_free(m_, 0);
    for (int i = 0; i < m_; ++i) row_free[i] = !want_slack[i];
    std::vector<double> w(m_);
    for (int v : structs) {
      col_times_binv(v, w);
      int r = -1;
      double best = 1e-9;
      for (int i = 0; i < m_; ++i)
        if (row_free[i] && std::fabs(w[i]) > best) {
          best = std::fabs(w[i]);
          r = i;
        }
      if (r < 0) {  // dependent column: keep v nonbasic (basis repair)
        stat_[v] = kNbLower;
        normalize_nonbasic(v);
        continue;
      }
      const double inv = 1.0 / w[r];
      double* rr = &binv_[static_cast<size_t>(r) * m_];
      for (int k = 0; k < m_; ++k) rr[k] *= inv;
      for (int p = 0; p < m_; ++p) {
        if (p == r) continue;
        const double f = w[p];
        if (std::fabs(f) <= kZeroTol) continue;
        double* pr = &binv_[static_cast<size_t>(p) * m_];
        for (int k = 0; k < m_; ++k) pr[k] -= f * rr[k];
      }
      const int old = basic_[r];
      stat_[old] = kNbLower;
      normalize_nonbasic(old);
      basic_[r] = v;
      stat_[v] = r;
      row_free[r] = 0;
    }
    for (int j = 0; j < n_ + m_; ++j)
      if (stat_[j] < 0) normalize_nonbasic(j);
    basis_valid_ = true;
    pivots_since_factor_ = 0;
  }

  // w = Binv * A_j (A_j = structural column or slack unit vector)
  void col_times_binv(int j, std::vector<double>& w) const {
    for (int i = 0; i < m_; ++i) w[i] = 0.0;
    if (j >= n_) {
      const int r = j - n_;
      for (int i = 0; i < m_; ++i) w[i] = binv_[static_cast<size_t>(i) * m_ + r];
      return;
    }
    for (const auto& e : cols_[j]) {
      const double c = e.coef;
      const int r = e.col;  // row index stored in col field
      for (int i = 0; i < m_; ++i) w[i] += c * binv_[static_cast<size_t>(i) * m_ + r];
    }
  }

  double dot_col(int j, const std::vector<double>& y) const {
    if (j >= n_) return y[j - n_];
    double s = 0.0;
    for (const auto& e : cols_[j]) s += e.coef * y[e.col];
    return s;
  }

  void compute_basic_values() {
    std::vector<double> r = rhs_;
    for (int j = 0; j < n_ + m_; ++j) {
      if (stat_[j] >= 0) continue;
      const double v = nb_value(j);
      if (v == 0.0) continue;
      if (j >= n_) {
        r[j - n_] -= v;
      } else {
        for (const auto& e : cols_[j]) r[e.col] -= v * e.coef;
      }
    }
    for (int p = 0; p < m_; ++p) {
      const double* br = &binv_[static_cast<size_t>(p) * m_];
      double s = 0.0;
      for (int k = 0; k < m_; ++k) s += br[k] * r[k];
      xb_[p] = s;
    }
  }

  bool accuracy_ok() {
    if (m_ == 0) return true;
    // spot-check one basic column: Binv * A_b should be a unit vector
    static thread_local std::mt19937 rng(12345);
    const int p = static_cast<int>(rng() % static_cast<unsigned>(m_));
    std::vector<double> w(m_);
    col_times_binv(basic_[p], w);
    double err = 0.0;
    for (int i = 0; i < m_; ++i) err = std::max(err, std::fabs(w[i] - (i == p ? 1.0 : 0.0)));
    return err < 1e-6;
  }

  void fill_primal(SolveStatus& st) const {
    st.x = solution();
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * st.x[j];
    st.objective = obj;
  }

  double duality_gap(const std::vector<double>& y, double primal) const {
    double dual = 0.0;
    for (int i = 0; i < m_; ++i) dual += y[i] * rhs_[i];
    for (int j = 0; j < n_ + m_; ++j) {
      if (stat_[j] >= 0) continue;
      const double rj = cost_[j] - dot_col(j, y);
      if (rj > 1e-7 && lo_[j] > -kInf)
        dual += rj * lo_[j];
      else if (rj < -1e-7 && up_[j] < kInf)
        dual += rj * up_[j];
    }
    return std::fabs(primal - dual) / (1.0 + std::fabs(primal));
  }
};

// One-shot LP solve with certificates per the module contract.
inline SolveStatus solve_lp(const LinearProgram& lp) {
  SimplexSolver s(lp);
  return s.solve();
}

}  // namespace bmp
