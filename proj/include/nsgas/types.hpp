#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsgas {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// 1/sqrt(17): lower bound on dist(0, ∂_δ H(x)) whenever H(x) >= -1.
inline const double kHardnessBound = 1.0 / std::sqrt(17.0);

/// Raised when a combinatorial certifier would exceed its configured size cap.
class IntractableInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

inline Vector unit_vector(Index dimension, Index coordinate) {
  Vector e = Vector::Zero(dimension);
  e(coordinate) = 1.0;
  return e;
}

/// Lexicographic order on vectors of equal size.
inline bool lexicographically_less(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (b(i) < a(i)) return false;
  }
  return false;
}

inline bool exactly_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace nsgas
