#pragma once

#include <nsgas/types.hpp>

#include <limits>
#include <vector>

namespace nsgas {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector solution;
  double value = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Dense two-phase tableau simplex for  max c'x  s.t.  Ax <= b, x >= 0.
// Entering column by most negative reduced cost, ties and ratio ties broken by
// smallest variable label. Problems here have a few dozen rows at most.
class TableauSimplex {
 public:
  TableauSimplex(const Matrix& A, const Vector& b, const Vector& c)
      : m_(static_cast<int>(A.rows())),
        n_(static_cast<int>(A.cols())),
        basic_(m_),
        nonbasic_(n_ + 1),
        d_(Matrix::Zero(m_ + 2, n_ + 2)) {
    d_.topLeftCorner(m_, n_) = A;
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      d_(i, n_) = -1.0;
      d_(i, n_ + 1) = b(i);
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      d_(m_, j) = -c(j);
    }
    nonbasic_[n_] = -1;
    d_(m_ + 1, n_) = 1.0;
  }

  LpResult solve() {
    LpResult out;
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (d_(i, n_ + 1) < d_(r, n_ + 1)) r = i;
    if (d_(r, n_ + 1) < -kEps) {
      pivot(r, n_);
      if (!run(1) || d_(m_ + 1, n_ + 1) < -kEps) {
        out.status = LpStatus::infeasible;
        return out;
      }
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j)
          if (s == -1 || d_(i, j) < d_(i, s) || (d_(i, j) == d_(i, s) && nonbasic_[j] < nonbasic_[s])) s = j;
        pivot(i, s);
      }
    }
    if (!run(2)) {
      out.status = LpStatus::unbounded;
      return out;
    }
    out.status = LpStatus::optimal;
    out.solution = Vector::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) out.solution(basic_[i]) = d_(i, n_ + 1);
    out.value = d_(m_, n_ + 1);
    return out;
  }

 private:
  static constexpr double kEps = 1e-11;
  static constexpr int kMaxPivots = 50000;

  void pivot(int r, int s) {
    const double inv = 1.0 / d_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double factor = d_(i, s) * inv;
      if (factor == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j)
        if (j != s) d_(i, j) -= d_(r, j) * factor;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) d_(r, j) *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) d_(i, s) *= -inv;
    d_(r, s) = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool run(int phase) {
    const int objective_row = phase == 1 ? m_ + 1 : m_;
    for (int iter = 0; iter < kMaxPivots; ++iter) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasic_[j] == -1) continue;
        if (s == -1 || d_(objective_row, j) < d_(objective_row, s) ||
            (d_(objective_row, j) == d_(objective_row, s) && nonbasic_[j] < nonbasic_[s]))
          s = j;
      }
      if (d_(objective_row, s) > -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_(i, s) < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_(i, n_ + 1) / d_(i, s);
        const double rhs = d_(r, n_ + 1) / d_(r, s);
        if (lhs < rhs || (lhs == rhs && basic_[i] < basic_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    throw std::runtime_error("simplex: pivot limit exceeded");
  }

  int m_;
  int n_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
  Matrix d_;
};

}  // namespace detail

/// Minimizes cost'z subject to A z <= b over free variables z.
inline LpResult minimize_linear(const Vector& cost, const Matrix& A, const Vector& b) {
  const Index n = cost.size();
  require(A.cols() == n && A.rows() == b.size(), "minimize_linear: dimension mismatch");
  if (A.rows() == 0) {
    LpResult out;
    if (cost.isZero(0.0)) {
      out.status = LpStatus::optimal;
      out.solution = Vector::Zero(n);
      out.value = 0.0;
    } else {
      out.status = LpStatus::unbounded;
    }
    return out;
  }
  // z = z+ - z-
  Matrix split(A.rows(), 2 * n);
  split << A, -A;
  Vector gain(2 * n);
  gain << -cost, cost;
  LpResult raw = detail::TableauSimplex(split, b, gain).solve();
  LpResult out;
  out.status = raw.status;
  if (raw.status == LpStatus::optimal) {
    out.solution = raw.solution.head(n) - raw.solution.tail(n);
    out.value = cost.dot(out.solution);
  }
  return out;
}

}  // namespace nsgas
