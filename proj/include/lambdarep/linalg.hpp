#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace lambdarep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double sup_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Broadcasts a scalar decay rate to a per-state vector.
inline Vector uniform_lambda(int n, double lambda) { return Vector::Constant(n, lambda); }

}  // namespace lambdarep
