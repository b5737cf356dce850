#pragma once

#include <string>
#include <vector>

#include "lambdarep/env.hpp"
#include "lambdarep/linalg.hpp"

namespace lambdarep::testing {

// Single-action MDP whose policy transition matrix is P.
inline TabularMDP markov_chain(const Matrix& P, double gamma) {
  return TabularMDP(P, 1, gamma, Vector::Constant(P.rows(), 1.0 / static_cast<double>(P.rows())));
}

// 0 -> 1 -> ... -> n-1 -> n-1.
inline Matrix chain_matrix(int n) {
  Matrix P = Matrix::Zero(n, n);
  for (int s = 0; s + 1 < n; ++s) P(s, s + 1) = 1.0;
  P(n - 1, n - 1) = 1.0;
  return P;
}

inline Matrix cycle_matrix(int n) {
  Matrix P = Matrix::Zero(n, n);
  for (int s = 0; s < n; ++s) P(s, (s + 1) % n) = 1.0;
  return P;
}

inline GridSpec grid_from_rows(const std::vector<std::string>& rows) {
  GridSpec g;
  g.rows = static_cast<int>(rows.size());
  g.cols = static_cast<int>(rows.front().size());
  for (const auto& r : rows) g.cells += r;
  return g;
}

}  // namespace lambdarep::testing
