#pragma once

// Seeded random samplers. Every caller owns its engine; nothing here keeps
// state between calls.

#include <random>
#include <vector>

#include "bohrlat/algcore.hpp"

namespace bohrlat {

using Rng = std::mt19937_64;

inline Vector random_gaussian_vector(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(normal(rng), normal(rng));
  return v;
}

inline Matrix random_gaussian_matrix(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal folded back into Q.
inline Matrix random_unitary(int n, Rng& rng) {
  const Matrix g = random_gaussian_matrix(n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

inline Matrix random_hermitian(int n, Rng& rng) {
  const Matrix g = random_gaussian_matrix(n, rng);
  return 0.5 * (g + g.adjoint());
}

inline Matrix random_rank_one_projection(int n, Rng& rng) {
  return rank_one_projection(random_gaussian_vector(n, rng));
}

/// u diag(values) u* for a Haar unitary u.
inline Matrix random_with_spectrum(const std::vector<double>& values, Rng& rng) {
  const int n = static_cast<int>(values.size());
  const Matrix u = random_unitary(n, rng);
  return u * diagonal(values) * u.adjoint();
}

/// Random effect with uniformly drawn eigenvalues in [0, 1].
inline Matrix random_effect(int n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> values(n);
  for (auto& v : values) v = unit(rng);
  return random_with_spectrum(values, rng);
}

/// Random projection of the given rank.
inline Matrix random_projection(int n, int rank, Rng& rng) {
  std::vector<double> values(n, 0.0);
  for (int i = 0; i < rank; ++i) values[i] = 1.0;
  return random_with_spectrum(values, rng);
}

/// Block-diagonal Haar unitary for a direct-sum shape.
inline AlgebraElement random_unitary(const AlgebraShape& shape, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int n : shape.blocks) blocks.push_back(random_unitary(n, rng));
  return {shape, std::move(blocks)};
}

}  // namespace bohrlat
