#pragma once

#include <nsgas/lp.hpp>
#include <nsgas/types.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace nsgas {

/// Closed convex polyhedron {y : A y <= b}. An empty row set is the whole space.
class Polyhedron {
 public:
  explicit Polyhedron(Index dimension = 0) : normals_(0, dimension), bounds_(0) {}

  Polyhedron(Matrix normals, Vector bounds) : normals_(std::move(normals)), bounds_(std::move(bounds)) {
    require(normals_.rows() == bounds_.size(), "Polyhedron: row count mismatch");
    require(normals_.allFinite() && bounds_.allFinite(), "Polyhedron: non-finite data");
  }

  Index dimension() const { return normals_.cols(); }
  Index constraint_count() const { return normals_.rows(); }
  const Matrix& normals() const { return normals_; }
  const Vector& bounds() const { return bounds_; }

  /// Adds {y : normal'y <= bound}.
  void add_halfspace(const Vector& normal, double bound) {
    require(normal.size() == dimension(), "Polyhedron::add_halfspace: dimension mismatch");
    const Index m = normals_.rows();
    normals_.conservativeResize(m + 1, Eigen::NoChange);
    bounds_.conservativeResize(m + 1);
    normals_.row(m) = normal.transpose();
    bounds_(m) = bound;
  }

  Polyhedron intersected(const Polyhedron& other) const {
    require(other.dimension() == dimension(), "Polyhedron::intersected: dimension mismatch");
    Matrix a(normals_.rows() + other.normals_.rows(), dimension());
    a << normals_, other.normals_;
    Vector b(bounds_.size() + other.bounds_.size());
    b << bounds_, other.bounds_;
    return {std::move(a), std::move(b)};
  }

  bool contains(const Vector& y, double tolerance = 1e-9) const {
    if (normals_.rows() == 0) return true;
    return ((normals_ * y - bounds_).array() <= tolerance).all();
  }

 private:
  Matrix normals_;
  Vector bounds_;
};

struct Projection {
  double distance = 0.0;
  Vector point;
};

namespace detail {

// The polyhedron is a cylinder over the span of its normals. All geometric
// queries are answered in orthonormal coordinates of that span.
struct ReducedSystem {
  bool constant_violation = false;
  Matrix basis;    // d x k
  Matrix normals;  // m x k, unit rows
  Vector bounds;   // m
};

inline ReducedSystem reduce(const Polyhedron& poly, double slack = 0.0) {
  ReducedSystem out;
  const Index d = poly.dimension();
  std::vector<Index> kept;
  std::vector<double> norms;
  for (Index i = 0; i < poly.constraint_count(); ++i) {
    const double norm = poly.normals().row(i).norm();
    if (norm <= 1e-13) {
      if (poly.bounds()(i) < -1e-12 - slack) out.constant_violation = true;
      continue;
    }
    kept.push_back(i);
    norms.push_back(norm);
  }
  const auto m = static_cast<Index>(kept.size());
  Matrix unit(m, d);
  out.bounds.resize(m);
  for (Index r = 0; r < m; ++r) {
    unit.row(r) = poly.normals().row(kept[r]) / norms[r];
    out.bounds(r) = poly.bounds()(kept[r]) / norms[r] + slack;
  }
  if (m == 0) {
    out.basis = Matrix(d, 0);
    out.normals = Matrix(0, 0);
    return out;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(unit.transpose());
  qr.setThreshold(1e-10);
  const Index k = qr.rank();
  out.basis = Matrix(qr.householderQ()).leftCols(k);
  out.normals = unit * out.basis;
  return out;
}

// max r  s.t.  N z + r <= b,  -cap <= r <= cap.   nullopt when infeasible.
inline std::optional<double> inscribed_radius(const ReducedSystem& sys, double cap) {
  if (sys.constant_violation) return std::nullopt;
  const Index m = sys.normals.rows();
  const Index k = sys.normals.cols();
  if (m == 0) return cap;
  Matrix a = Matrix::Zero(m + 2, k + 1);
  Vector b(m + 2);
  a.topLeftCorner(m, k) = sys.normals;
  a.block(0, k, m, 1).setOnes();
  b.head(m) = sys.bounds;
  a(m, k) = 1.0;
  b(m) = cap;
  a(m + 1, k) = -1.0;
  b(m + 1) = cap;
  Vector cost = Vector::Zero(k + 1);
  cost(k) = -1.0;
  const LpResult lp = minimize_linear(cost, a, b);
  if (lp.status != LpStatus::optimal) return std::nullopt;
  return lp.solution(k);
}

inline double max_violation(const Matrix& normals, const Vector& bounds, const Vector& z) {
  if (normals.rows() == 0) return -std::numeric_limits<double>::infinity();
  return (normals * z - bounds).maxCoeff();
}

// Exact projection onto {N_S z = b_S}; returns multipliers alongside.
inline std::pair<Vector, Vector> project_affine(const Matrix& normals, const Vector& bounds,
                                                const std::vector<Index>& active, const Vector& z0) {
  const auto s = static_cast<Index>(active.size());
  Matrix ns(s, normals.cols());
  Vector bs(s);
  for (Index i = 0; i < s; ++i) {
    ns.row(i) = normals.row(active[i]);
    bs(i) = bounds(active[i]);
  }
  const Matrix gram = ns * ns.transpose();
  const Vector lambda = gram.completeOrthogonalDecomposition().solve(ns * z0 - bs);
  return {z0 - ns.transpose() * lambda, lambda};
}

// Primal active-set refinement started from the constraints active at `guess`.
inline std::optional<Vector> polish_projection(const Matrix& normals, const Vector& bounds, const Vector& z0,
                                               const Vector& guess) {
  const Index m = normals.rows();
  std::vector<Index> active;
  for (Index i = 0; i < m; ++i)
    if (normals.row(i).dot(guess) >= bounds(i) - 1e-7) active.push_back(i);
  for (int iter = 0; iter < 4 * static_cast<int>(m) + 8; ++iter) {
    if (active.empty()) {
      if (max_violation(normals, bounds, z0) <= 1e-12) return z0;
      return std::nullopt;
    }
    auto [z, lambda] = project_affine(normals, bounds, active, z0);
    Index worst_multiplier = 0;
    for (Index i = 1; i < lambda.size(); ++i)
      if (lambda(i) < lambda(worst_multiplier)) worst_multiplier = i;
    if (lambda(worst_multiplier) < -1e-12) {
      active.erase(active.begin() + worst_multiplier);
      continue;
    }
    Index worst_row = -1;
    double worst = 1e-12 * (1.0 + z.norm());
    for (Index i = 0; i < m; ++i) {
      const double v = normals.row(i).dot(z) - bounds(i);
      if (v > worst) {
        worst = v;
        worst_row = i;
      }
    }
    if (worst_row < 0) return z;
    if (std::find(active.begin(), active.end(), worst_row) != active.end()) return std::nullopt;
    active.push_back(worst_row);
  }
  return std::nullopt;
}

// KKT point over all active sets of at most k independent rows. Exhaustive,
// so only used when the active-set polish fails and the system is small.
inline std::optional<Vector> enumerate_projection(const Matrix& normals, const Vector& bounds, const Vector& z0) {
  const Index m = normals.rows();
  const Index k = normals.cols();
  if (k > 4 || m > 40) return std::nullopt;
  std::optional<Vector> best;
  double best_distance = std::numeric_limits<double>::infinity();
  std::vector<Index> subset;
  std::function<void(Index)> visit = [&](Index next) {
    if (!subset.empty()) {
      auto [z, lambda] = project_affine(normals, bounds, subset, z0);
      if ((lambda.array() >= -1e-12).all() && max_violation(normals, bounds, z) <= 1e-10 * (1.0 + z.norm())) {
        const double dist = (z - z0).norm();
        if (dist < best_distance) {
          best_distance = dist;
          best = z;
        }
      }
    }
    if (static_cast<Index>(subset.size()) == k) return;
    for (Index i = next; i < m; ++i) {
      subset.push_back(i);
      visit(i + 1);
      subset.pop_back();
    }
  };
  visit(0);
  return best;
}

// Dykstra's alternating projections onto the halfspaces, then an active-set polish.
inline Vector project_reduced(const Matrix& normals, const Vector& bounds, const Vector& z0) {
  const Index m = normals.rows();
  if (m == 0 || max_violation(normals, bounds, z0) <= 0.0) return z0;
  Vector z = z0;
  Matrix increments = Matrix::Zero(m, normals.cols());
  constexpr int kMaxIterations = 100000;
  constexpr double kTolerance = 1e-10;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Vector previous = z;
    for (Index i = 0; i < m; ++i) {
      const Vector y = z + increments.row(i).transpose();
      const double excess = normals.row(i).dot(y) - bounds(i);
      z = excess > 0.0 ? Vector(y - excess * normals.row(i).transpose()) : y;
      increments.row(i) = (y - z).transpose();
    }
    // z can stall for a cycle while the increments still move, so require feasibility too
    if ((z - previous).norm() <= kTolerance && max_violation(normals, bounds, z) <= kTolerance) break;
  }
  if (auto exact = polish_projection(normals, bounds, z0, z)) return *exact;
  if (auto exact = enumerate_projection(normals, bounds, z0)) return *exact;
  return z;
}

inline Projection project(const ReducedSystem& sys, const Vector& x) {
  Projection out;
  if (sys.basis.cols() == 0) {
    out.point = x;
    return out;
  }
  const Vector z0 = sys.basis.transpose() * x;
  const Vector z = project_reduced(sys.normals, sys.bounds, z0);
  out.point = x + sys.basis * (z - z0);
  out.distance = (z - z0).norm();
  return out;
}

}  // namespace detail

/// Radius of the largest ball inside the polyhedron, clipped to [-cap, cap].
/// Negative values measure how much the halfspaces must be relaxed to become
/// feasible; nullopt when even that is impossible.
inline std::optional<double> inscribed_radius(const Polyhedron& poly, double cap = 1.0) {
  return detail::inscribed_radius(detail::reduce(poly), cap);
}

inline bool is_full_dimensional(const Polyhedron& poly, double tolerance = 1e-9) {
  const auto r = inscribed_radius(poly);
  return r && *r > tolerance;
}

inline bool is_nonempty(const Polyhedron& poly, double tolerance = 1e-10) {
  const auto r = inscribed_radius(poly);
  return r && *r >= -tolerance;
}

/// Euclidean distance from x to the polyhedron and the nearest point.
inline Projection region_distance(const Polyhedron& poly, const Vector& x) {
  require(x.size() == poly.dimension(), "region_distance: dimension mismatch");
  const auto sys = detail::reduce(poly);
  const auto r = detail::inscribed_radius(sys, 1.0);
  if (!r || *r < -1e-10) throw std::invalid_argument("region_distance: empty polyhedron");
  return detail::project(sys, x);
}

/// Distance to {A y <= b + slack * |a_i|}, or nullopt when that set is empty.
inline std::optional<Projection> relaxed_distance(const Polyhedron& poly, const Vector& x, double slack) {
  const auto sys = detail::reduce(poly, slack);
  const auto r = detail::inscribed_radius(sys, 1.0);
  if (!r || *r < 0.0) return std::nullopt;
  return detail::project(sys, x);
}

}  // namespace nsgas
