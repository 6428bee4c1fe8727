#pragma once

// Dense two-phase simplex, templated on the scalar so the same code runs in
// exact rational arithmetic (bounds, tightness) and in double precision
// (membership tests on measured boxes).

#include <cmath>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "tichain/errors.hpp"
#include "tichain/rational.hpp"

namespace tichain {

/// minimize c.x subject to A x = b, x >= 0.
template <class Scalar>
struct LinearProgram {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

template <class Scalar>
struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Scalar value = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  /// Phase-one optimum: total artificial mass left (zero when feasible).
  Scalar infeasibility = 0;
  int pivots = 0;
};

namespace detail {

template <class Scalar>
class Tableau {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Tableau(const LinearProgram<Scalar>& lp, Scalar eps) : eps_(eps) {
    m_ = static_cast<int>(lp.A.rows());
    n_ = static_cast<int>(lp.A.cols());
    // Columns: n structural, m artificial, then right-hand side.
    t_ = Mat::Zero(m_ + 1, n_ + m_ + 1);
    for (int i = 0; i < m_; ++i) {
      const bool flip = lp.b(i) < 0;
      for (int j = 0; j < n_; ++j) t_(i, j) = flip ? Scalar(-lp.A(i, j)) : lp.A(i, j);
      t_(i, n_ + i) = 1;
      t_(i, n_ + m_) = flip ? Scalar(-lp.b(i)) : lp.b(i);
    }
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  LpResult<Scalar> solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& cost) {
    LpResult<Scalar> r;
    // Phase one: minimize the sum of artificials.
    for (int j = 0; j <= n_ + m_; ++j) t_(m_, j) = 0;
    for (int i = 0; i < m_; ++i) t_(m_, n_ + i) = 1;
    for (int i = 0; i < m_; ++i) subtract_row(m_, i, Scalar(1));
    if (!iterate(n_ + m_, r.pivots)) {
      throw NumericalError("simplex: phase one reported an unbounded ray");
    }
    r.infeasibility = -t_(m_, n_ + m_);
    if (r.infeasibility > eps_) {
      r.status = LpStatus::kInfeasible;
      return r;
    }
    drive_out_artificials(r.pivots);

    // Phase two on the structural columns only.
    for (int j = 0; j <= n_ + m_; ++j) t_(m_, j) = 0;
    for (int j = 0; j < n_; ++j) t_(m_, j) = cost(j);
    for (int i = 0; i < m_; ++i) {
      if (active_[i] && basis_[i] < n_ && !is_zero(t_(m_, basis_[i]))) {
        subtract_row(m_, i, Scalar(t_(m_, basis_[i])));
      }
    }
    if (!iterate(n_, r.pivots)) {
      r.status = LpStatus::kUnbounded;
      return r;
    }
    r.status = LpStatus::kOptimal;
    r.value = -t_(m_, n_ + m_);
    r.x = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      if (active_[i] && basis_[i] < n_) r.x(basis_[i]) = t_(i, n_ + m_);
    }
    return r;
  }

 private:
  bool is_zero(const Scalar& v) const { return v <= eps_ && v >= -eps_; }

  void subtract_row(int target, int source, const Scalar& factor) {
    for (int j = 0; j <= n_ + m_; ++j) {
      if (!is_zero(t_(source, j))) t_(target, j) -= factor * t_(source, j);
    }
  }

  void pivot(int row, int col) {
    const Scalar p = t_(row, col);
    for (int j = 0; j <= n_ + m_; ++j) {
      if (!is_zero(t_(row, j))) t_(row, j) /= p;
    }
    t_(row, col) = 1;
    for (int i = 0; i <= m_; ++i) {
      if (i == row || is_zero(t_(i, col))) continue;
      const Scalar f = t_(i, col);
      subtract_row(i, row, f);
      t_(i, col) = 0;
    }
    basis_[row] = col;
  }

  // Dantzig pricing; switches to Bland's rule after a run of degenerate
  // pivots so that cycling cannot occur. Returns false when unbounded.
  bool iterate(int limit, int& pivots) {
    if (active_.empty()) active_.assign(m_, true);
    int degenerate = 0;
    for (;;) {
      const bool bland = degenerate > 2 * (m_ + 1);
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (!(t_(m_, j) < -eps_)) continue;
        if (enter < 0 || (!bland && t_(m_, j) < t_(m_, enter))) enter = j;
        if (bland) break;
      }
      if (enter < 0) return true;
      int leave = -1;
      Scalar best_ratio = 0;
      for (int i = 0; i < m_; ++i) {
        if (!active_[i] || !(t_(i, enter) > eps_)) continue;
        Scalar ratio = t_(i, n_ + m_) / t_(i, enter);
        if (leave < 0 || ratio < best_ratio ||
            (!(best_ratio < ratio) && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;
      degenerate = is_zero(best_ratio) ? degenerate + 1 : 0;
      pivot(leave, enter);
      if (++pivots > max_pivots_) throw NumericalError("simplex: pivot limit reached");
    }
  }

  void drive_out_artificials(int& pivots) {
    for (int i = 0; i < m_; ++i) {
      if (!active_[i] || basis_[i] < n_) continue;
      int col = -1;
      for (int j = 0; j < n_; ++j) {
        if (!is_zero(t_(i, j))) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        ++pivots;
      } else {
        active_[i] = false;  // redundant equality
      }
    }
  }

  int m_ = 0;
  int n_ = 0;
  int max_pivots_ = 200000;
  Scalar eps_;
  Mat t_;
  std::vector<int> basis_;
  std::vector<bool> active_;
};

}  // namespace detail

/// Solves the program exactly for Rational, or with pivot tolerance `eps`
/// for floating point scalars.
template <class Scalar>
LpResult<Scalar> solve_lp(const LinearProgram<Scalar>& lp, double eps = 1e-9) {
  if (lp.A.rows() != lp.b.size() || lp.A.cols() != lp.c.size()) {
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  }
  Scalar tolerance = std::is_floating_point_v<Scalar> ? Scalar(eps) : Scalar(0);
  detail::Tableau<Scalar> tableau(lp, tolerance);
  return tableau.solve(lp.c);
}

}  // namespace tichain
