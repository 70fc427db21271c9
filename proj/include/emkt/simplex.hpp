// Copyright 2026 The emkt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "emkt/common.hpp"
#include "emkt/linalg.hpp"
#include "emkt/lp_problem.hpp"

namespace emkt {

/// Revised primal simplex over general bounds.
///
/// Rows are converted to equalities with one logical (slack) column each;
/// phase 1 minimizes the sum of bound violations of basic variables
/// (composite method, no big-M). The basis inverse is kept as an LU
/// factorization plus product-form eta updates, refreshed every
/// `refactor_interval` pivots. Dantzig pricing switches to Bland's rule
/// when degeneracy is detected, which guarantees termination.
class SimplexSolver {
 public:
  struct Options {
    double feas_tol = 1e-7;
    double dj_tol = 1e-9;
    double pivot_tol = 1e-10;
    int refactor_interval = 100;
    long max_iterations = 500000;
  };

  enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

  /// Restart state: which column is basic in each row plus every column's
  /// nonbasic rest position.
  struct Basis {
    std::vector<int> basic;
    std::vector<char> vstat;  // values from VStat
    bool valid() const { return !basic.empty(); }
  };

  struct Result {
    Status status = Status::kIterationLimit;
    double objective = 0.0;       // in the problem's own sense
    std::vector<double> x;        // structural variable values
    long iterations = 0;
  };

  SimplexSolver(const MilpProblem& p, Options opt = {}) : opt_(opt) {
    build(p, nullptr, nullptr);
  }

  /// `lb_override`/`ub_override`, when given, replace the structural bounds
  /// (branch-and-bound uses this for node bounds).
  SimplexSolver(const MilpProblem& p, const std::vector<double>* lb_override,
                const std::vector<double>* ub_override, Options opt = {})
      : opt_(opt) {
    build(p, lb_override, ub_override);
  }

  Result solve(Basis* warm = nullptr) {
    if (warm && warm->valid() && static_cast<int>(warm->vstat.size()) == total_ &&
        static_cast<int>(warm->basic.size()) == m_) {
      basic_ = warm->basic;
      vstat_ = warm->vstat;
      normalize_nonbasic_positions();
    } else {
      slack_basis();
    }
    if (!refactor()) {
      slack_basis();
      if (!refactor()) throw SolverError("simplex: singular identity basis (internal)");
    }
    compute_basic_values();

    Result res;
    long iter = 0;
    int degen_streak = 0;
    bool bland = false;

    std::vector<double> y(m_), w(m_);
    while (true) {
      if (iter >= opt_.max_iterations) {
        res.status = Status::kIterationLimit;
        break;
      }
      ++iter;

      // Phase is decided by the current basic solution.
      const bool phase1 = infeasibility() > opt_.feas_tol;

      // Objective row for pricing.
      std::vector<double> cb(m_);
      for (int i = 0; i < m_; ++i) {
        const int j = basic_[i];
        if (phase1) {
          if (xb_[i] < lb_[j] - opt_.feas_tol) cb[i] = -1.0;
          else if (xb_[i] > ub_[j] + opt_.feas_tol) cb[i] = 1.0;
          else cb[i] = 0.0;
        } else {
          cb[i] = cost_[j];
        }
      }
      btran(y, cb);

      // Pricing: most negative candidate (Dantzig), or first (Bland).
      int q = -1;
      int q_dir = 0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        const char st = vstat_[j];
        if (st == kBasic) continue;
        if (lb_[j] == ub_[j]) continue;  // fixed, can never move
        const double cj = phase1 ? 0.0 : cost_[j];
        const double dj = cj - dot_col(j, y);
        int dir = 0;
        double score = 0.0;
        if (st == kAtLower || st == kFreeNb) {
          if (dj < -opt_.dj_tol) { dir = +1; score = -dj; }
        }
        if (dir == 0 && (st == kAtUpper || st == kFreeNb)) {
          if (dj > opt_.dj_tol) { dir = -1; score = dj; }
        }
        if (dir == 0) continue;
        if (bland) { q = j; q_dir = dir; break; }
        if (score > best) { best = score; q = j; q_dir = dir; }
      }

      if (q < 0) {
        if (phase1) {
          res.status = Status::kInfeasible;
        } else {
          res.status = Status::kOptimal;
        }
        break;
      }

      ftran_col(w, q);

      // Ratio test. The entering variable moves by theta >= 0 in direction
      // q_dir; basic variable i moves at rate -q_dir * w[i].
      double theta = kInf;
      int leave_row = -1;
      char leave_state = kAtLower;
      double leave_abs_w = 0.0;
      const double bound_gap =
          (lb_[q] > -kInf && ub_[q] < kInf) ? ub_[q] - lb_[q] : kInf;

      for (int i = 0; i < m_; ++i) {
        if (std::fabs(w[i]) <= opt_.pivot_tol) continue;
        const double rate = -q_dir * w[i];
        const int j = basic_[i];
        const double x = xb_[i];
        double cand = kInf;
        char state = kAtLower;
        if (phase1 && x < lb_[j] - opt_.feas_tol) {
          if (rate > 0.0) { cand = (lb_[j] - x) / rate; state = kAtLower; }
        } else if (phase1 && x > ub_[j] + opt_.feas_tol) {
          if (rate < 0.0) { cand = (ub_[j] - x) / rate; state = kAtUpper; }
        } else {
          if (rate > 0.0 && ub_[j] < kInf) { cand = (ub_[j] - x) / rate; state = kAtUpper; }
          else if (rate < 0.0 && lb_[j] > -kInf) { cand = (lb_[j] - x) / rate; state = kAtLower; }
        }
        if (cand == kInf) continue;
        if (cand < 0.0) cand = 0.0;  // numerical dust
        const bool better =
            bland ? (cand < theta - 1e-12 ||
                     (cand <= theta + 1e-12 && (leave_row < 0 || j < basic_[leave_row])))
                  : (cand < theta - 1e-12 ||
                     (cand <= theta + 1e-12 && std::fabs(w[i]) > leave_abs_w));
        if (better) {
          theta = cand;
          leave_row = i;
          leave_state = state;
          leave_abs_w = std::fabs(w[i]);
        }
      }

      const bool flip = bound_gap < theta;
      if (flip) theta = bound_gap;

      if (theta == kInf) {
        if (phase1)
          throw SolverError("simplex: unbounded phase-1 direction (numerical breakdown)");
        res.status = Status::kUnbounded;
        break;
      }

      // Track degeneracy for the Bland switch.
      if (theta <= 1e-11) {
        if (++degen_streak > 50) bland = true;
      } else {
        degen_streak = 0;
        bland = false;
      }

      // Apply the step.
      if (theta != 0.0)
        for (int i = 0; i < m_; ++i) xb_[i] += (-q_dir * w[i]) * theta;

      if (flip) {
        vstat_[q] = (vstat_[q] == kAtLower) ? kAtUpper : kAtLower;
        continue;
      }

      const double enter_value = nonbasic_value(q) + q_dir * theta;
      const int leaving = basic_[leave_row];
      if (std::fabs(w[leave_row]) <= opt_.pivot_tol)
        throw SolverError("simplex: pivot below tolerance after ratio test");
      vstat_[leaving] = leave_state;
      vstat_[q] = kBasic;
      basic_[leave_row] = q;
      xb_[leave_row] = enter_value;

      etas_.push_back({leave_row, w});
      ++pivots_;
      if (pivots_ % opt_.refactor_interval == 0 ||
          static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
        if (!refactor()) {
          // Numerical singularity: retry once from a clean slack basis.
          if (repaired_) throw SolverError("simplex: singular basis after refactorization retry; basis dump: " + basis_dump());
          repaired_ = true;
          slack_basis();
          if (!refactor()) throw SolverError("simplex: singular identity basis (internal)");
        }
        compute_basic_values();
      }
    }

    res.iterations = iter;
    if (res.status == Status::kOptimal) {
      res.x = extract_structural();
      double obj = 0.0;
      for (int j = 0; j < n_; ++j) obj += cost_[j] * res.x[j];
      res.objective = sense_sign_ * obj;
    }
    if (warm) {
      warm->basic = basic_;
      warm->vstat = vstat_;
    }
    return res;
  }

 private:
  static constexpr char kBasic = 0;
  static constexpr char kAtLower = 1;
  static constexpr char kAtUpper = 2;
  static constexpr char kFreeNb = 3;

  void build(const MilpProblem& p, const std::vector<double>* lbo,
             const std::vector<double>* ubo) {
    n_ = p.num_vars();
    m_ = p.num_rows();
    total_ = n_ + m_;
    sense_sign_ = (p.sense == Sense::kMaximize) ? -1.0 : 1.0;

    lb_.resize(total_);
    ub_.resize(total_);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lbo ? (*lbo)[j] : p.variables()[j].lb;
      ub_[j] = ubo ? (*ubo)[j] : p.variables()[j].ub;
      cost_[j] = sense_sign_ * p.objective()[j];
    }
    rhs_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const auto& r = p.constraints()[i];
      rhs_[i] = r.rhs;
      switch (r.rel) {
        case Relation::kLessEqual: lb_[n_ + i] = 0.0; ub_[n_ + i] = kInf; break;
        case Relation::kGreaterEqual: lb_[n_ + i] = -kInf; ub_[n_ + i] = 0.0; break;
        case Relation::kEqual: lb_[n_ + i] = 0.0; ub_[n_ + i] = 0.0; break;
      }
    }

    // Column-major copy of the structural matrix.
    std::vector<int> count(n_, 0);
    for (const auto& r : p.constraints())
      for (const auto& [j, c] : r.terms)
        if (c != 0.0) ++count[j];
    colptr_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) colptr_[j + 1] = colptr_[j] + count[j];
    colrow_.resize(colptr_[n_]);
    colval_.resize(colptr_[n_]);
    std::vector<int> fill(colptr_.begin(), colptr_.end() - 1);
    for (int i = 0; i < m_; ++i)
      for (const auto& [j, c] : p.constraints()[i].terms)
        if (c != 0.0) {
          colrow_[fill[j]] = i;
          colval_[fill[j]] = c;
          ++fill[j];
        }
  }

  void slack_basis() {
    basic_.resize(m_);
    vstat_.assign(total_, kAtLower);
    for (int j = 0; j < n_; ++j) {
      if (lb_[j] > -kInf) vstat_[j] = kAtLower;
      else if (ub_[j] < kInf) vstat_[j] = kAtUpper;
      else vstat_[j] = kFreeNb;
    }
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      vstat_[n_ + i] = kBasic;
    }
  }

  // A warm basis may carry rest positions that the new bounds invalidate
  // (e.g. a column now fixed elsewhere); snap those to the nearest bound.
  void normalize_nonbasic_positions() {
    for (int j = 0; j < total_; ++j) {
      if (vstat_[j] == kBasic) continue;
      if (vstat_[j] == kAtLower && lb_[j] == -kInf)
        vstat_[j] = (ub_[j] < kInf) ? kAtUpper : kFreeNb;
      else if (vstat_[j] == kAtUpper && ub_[j] == kInf)
        vstat_[j] = (lb_[j] > -kInf) ? kAtLower : kFreeNb;
      else if (vstat_[j] == kFreeNb && lb_[j] > -kInf)
        vstat_[j] = kAtLower;
    }
  }

  double nonbasic_value(int j) const {
    switch (vstat_[j]) {
      case kAtLower: return lb_[j];
      case kAtUpper: return ub_[j];
      default: return 0.0;
    }
  }

  double dot_col(int j, const std::vector<double>& y) const {
    if (j >= n_) return y[j - n_];
    double s = 0.0;
    for (int k = colptr_[j]; k < colptr_[j + 1]; ++k) s += colval_[k] * y[colrow_[k]];
    return s;
  }

  void scatter_col(int j, std::vector<double>& dense, double scale) const {
    if (j >= n_) {
      dense[j - n_] += scale;
      return;
    }
    for (int k = colptr_[j]; k < colptr_[j + 1]; ++k) dense[colrow_[k]] += scale * colval_[k];
  }

  bool refactor() {
    Matrix b(m_, m_, 0.0);
    for (int col = 0; col < m_; ++col) {
      const int j = basic_[col];
      if (j >= n_) {
        b(j - n_, col) = 1.0;
      } else {
        for (int k = colptr_[j]; k < colptr_[j + 1]; ++k) b(colrow_[k], col) += colval_[k];
      }
    }
    etas_.clear();
    return lu_.factor(std::move(b));
  }

  void compute_basic_values() {
    std::vector<double> r(rhs_);
    for (int j = 0; j < total_; ++j) {
      if (vstat_[j] == kBasic) continue;
      const double v = nonbasic_value(j);
      if (v != 0.0) scatter_col(j, r, -v);
    }
    std::vector<double> sol;
    // No etas right after a refactor, but handle the general case anyway.
    lu_.solve(sol, r);
    for (const auto& e : etas_) apply_eta_ftran(sol, e);
    xb_ = std::move(sol);
  }

  struct Eta {
    int row;
    std::vector<double> w;
  };

  static void apply_eta_ftran(std::vector<double>& z, const Eta& e) {
    const double t = z[e.row] / e.w[e.row];
    if (t != 0.0) {
      for (size_t i = 0; i < z.size(); ++i) z[i] -= e.w[i] * t;
    }
    z[e.row] = t;
  }

  static void apply_eta_btran(std::vector<double>& y, const Eta& e) {
    double s = y[e.row];
    for (size_t i = 0; i < y.size(); ++i)
      if (static_cast<int>(i) != e.row) s -= e.w[i] * y[i];
    y[e.row] = s / e.w[e.row];
  }

  void ftran_col(std::vector<double>& out, int j) {
    std::vector<double> v(m_, 0.0);
    scatter_col(j, v, 1.0);
    lu_.solve(out, v);
    for (const auto& e : etas_) apply_eta_ftran(out, e);
  }

  void btran(std::vector<double>& out, const std::vector<double>& c) {
    std::vector<double> v(c);
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) apply_eta_btran(v, *it);
    lu_.solve_transpose(out, v);
  }

  double infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (xb_[i] < lb_[j]) s += lb_[j] - xb_[i];
      else if (xb_[i] > ub_[j]) s += xb_[i] - ub_[j];
    }
    return s;
  }

  std::vector<double> extract_structural() const {
    std::vector<double> x(n_);
    for (int j = 0; j < n_; ++j) x[j] = nonbasic_value(j);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) x[basic_[i]] = xb_[i];
    // Clip solver dust so downstream bookkeeping sees clean bounds.
    for (int j = 0; j < n_; ++j) {
      if (lb_[j] > -kInf && x[j] < lb_[j]) x[j] = lb_[j];
      if (ub_[j] < kInf && x[j] > ub_[j]) x[j] = ub_[j];
    }
    return x;
  }

  std::string basis_dump() const {
    std::ostringstream os;
    os << "m=" << m_ << " basic=[";
    for (int i = 0; i < std::min(m_, 50); ++i) os << (i ? "," : "") << basic_[i];
    if (m_ > 50) os << ",...";
    os << "]";
    return os.str();
  }

  Options opt_;
  int n_ = 0, m_ = 0, total_ = 0;
  double sense_sign_ = 1.0;
  std::vector<double> lb_, ub_, cost_, rhs_;
  std::vector<int> colptr_, colrow_;
  std::vector<double> colval_;

  std::vector<int> basic_;
  std::vector<char> vstat_;
  std::vector<double> xb_;
  LuFactor lu_;
  std::vector<Eta> etas_;
  long pivots_ = 0;
  bool repaired_ = false;
};

/// Solves the LP relaxation of `p` (integrality marks ignored).
inline MilpSolution solve_lp(const MilpProblem& p, SimplexSolver::Options opt = {}) {
  p.validate();
  SimplexSolver solver(p, opt);
  const auto r = solver.solve();
  MilpSolution out;
  out.objective = r.objective;
  out.best_bound = r.objective;
  out.values = r.x;
  switch (r.status) {
    case SimplexSolver::Status::kOptimal: out.status = SolveStatus::kOptimal; break;
    case SimplexSolver::Status::kInfeasible: out.status = SolveStatus::kInfeasible; break;
    case SimplexSolver::Status::kUnbounded: out.status = SolveStatus::kUnbounded; break;
    case SimplexSolver::Status::kIterationLimit: out.status = SolveStatus::kIterationLimit; break;
  }
  return out;
}

}  // namespace emkt
