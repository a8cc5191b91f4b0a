#pragma once

// Symmetries of M_n(C) in their six guises (pure-state maps, density-matrix
// maps, Jordan maps, effect maps, projection maps, subalgebra maps) and the
// conversions between them.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "bohrlat/csub.hpp"
#include "bohrlat/random.hpp"

namespace bohrlat {

/// A unitary or antiunitary operator, stored as u with antiunitary = true
/// meaning u∘K for K complex conjugation in the standard basis.
struct Generator {
  Matrix u;
  bool antiunitary = false;

  static Generator identity(int n) { return {bohrlat::identity(n), false}; }

  int dim() const { return static_cast<int>(u.rows()); }

  void validate(double tol = 1e-9) const {
    if (!is_unitary(u, tol)) throw PreconditionError("Generator: u is not unitary");
  }

  /// a -> u a u*  or  a -> u conj(a) u*.
  Matrix act(const Matrix& a) const {
    require_same_dim(u, a, "Generator::act");
    return antiunitary ? Matrix(u * a.conjugate() * u.adjoint())
                       : Matrix(u * a * u.adjoint());
  }

  AlgebraElement act(const AlgebraElement& a, const AlgebraShape& codomain,
                     double tol = 1e-9) const {
    return AlgebraElement::from_full(codomain, act(a.to_full()), std::max(tol, 1e-7));
  }
};

// ---------------------------------------------------------------------------
// Hermitian basis and real-linear maps on self-adjoint matrices

/// Real basis of the n x n Hermitian matrices: E_jj, then for j < k the pair
/// E_jk + E_kj and i(E_jk - E_kj). Orthogonal for the trace pairing.
inline std::vector<Matrix> hermitian_basis(int n) {
  std::vector<Matrix> basis;
  for (int j = 0; j < n; ++j) basis.push_back(matrix_unit(n, j, j));
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      basis.push_back(matrix_unit(n, j, k) + matrix_unit(n, k, j));
      basis.push_back(Complex(0, 1) * (matrix_unit(n, j, k) - matrix_unit(n, k, j)));
    }
  }
  return basis;
}

/// Coordinates of the Hermitian part of a in hermitian_basis(n).
inline Eigen::VectorXd hermitian_coords(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::VectorXd c(n * n);
  int idx = 0;
  for (int j = 0; j < n; ++j) c[idx++] = h(j, j).real();
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      c[idx++] = h(j, k).real();
      c[idx++] = h(j, k).imag();
    }
  }
  return c;
}

/// A real-linear map on Hermitian matrices, stored as its images of
/// hermitian_basis(n).
class LinearMapTable {
 public:
  LinearMapTable() = default;

  LinearMapTable(int n, std::vector<Matrix> images) : n_(n), images_(std::move(images)) {
    if (static_cast<int>(images_.size()) != n * n) {
      throw DimensionMismatch("LinearMapTable: expected n^2 images");
    }
    for (const auto& m : images_) {
      if (m.rows() != n || m.cols() != n) throw DimensionMismatch("LinearMapTable: image size");
    }
  }

  template <typename F>
  static LinearMapTable from_function(int n, F&& f) {
    std::vector<Matrix> images;
    for (const auto& b : hermitian_basis(n)) images.push_back(f(b));
    return {n, std::move(images)};
  }

  static LinearMapTable identity(int n) {
    return from_function(n, [](const Matrix& a) { return a; });
  }

  int dim() const { return n_; }
  const std::vector<Matrix>& images() const { return images_; }

  /// J(a) for a self-adjoint (the Hermitian part of a is used).
  Matrix apply(const Matrix& a) const {
    if (a.rows() != n_ || a.cols() != n_) throw DimensionMismatch("LinearMapTable::apply");
    const Eigen::VectorXd c = hermitian_coords(a);
    Matrix out = zeros(n_);
    for (int i = 0; i < n_ * n_; ++i) out += c[i] * images_[i];
    return out;
  }

  Matrix operator()(const Matrix& a) const { return apply(a); }

 private:
  int n_ = 0;
  std::vector<Matrix> images_;
};

inline LinearMapTable jordan_from_generator(const Generator& g) {
  return LinearMapTable::from_function(g.dim(), [&](const Matrix& a) { return g.act(a); });
}

/// C-linear extension J(b) + i J(c) with b = (a + a*)/2, c = -i(a - a*)/2.
inline Matrix complexify(const LinearMapTable& j, const Matrix& a) {
  const Matrix b = 0.5 * (a + a.adjoint());
  const Matrix c = Complex(0, -0.5) * (a - a.adjoint());
  return j.apply(b) + Complex(0, 1) * j.apply(c);
}

/// Unit preserved, images self-adjoint, and J(x∘y) = J(x)∘J(y) on all basis
/// pairs (which spans by bilinearity).
inline bool is_jordan(const LinearMapTable& j, const Tolerance& tol = {}) {
  const int n = j.dim();
  for (const auto& m : j.images()) {
    if (!is_self_adjoint(m, tol.eq_tol)) return false;
  }
  if (!approx_equal(j.apply(identity(n)), identity(n), tol.eq_tol)) return false;
  const auto basis = hermitian_basis(n);
  for (std::size_t x = 0; x < basis.size(); ++x) {
    for (std::size_t y = x; y < basis.size(); ++y) {
      const Matrix lhs = j.apply(jordan_product(basis[x], basis[y]));
      const Matrix rhs = jordan_product(j.images()[x], j.images()[y]);
      if (!approx_equal(lhs, rhs, tol.eq_tol)) return false;
    }
  }
  return true;
}

/// Tr(K(rho) a) = Tr(rho J(a)) over all basis pairs, plus trace
/// preservation of K.
inline bool kadison_jordan_duality_check(const LinearMapTable& k, const LinearMapTable& j,
                                         const Tolerance& tol = {}) {
  if (k.dim() != j.dim()) throw DimensionMismatch("kadison_jordan_duality_check");
  const auto basis = hermitian_basis(k.dim());
  for (std::size_t r = 0; r < basis.size(); ++r) {
    if (std::abs((k.images()[r] - basis[r]).trace()) > tol.eq_tol) return false;
    for (std::size_t a = 0; a < basis.size(); ++a) {
      const Complex lhs = (k.images()[r] * basis[a]).trace();
      const Complex rhs = (basis[r] * j.images()[a]).trace();
      if (std::abs(lhs - rhs) > tol.eq_tol) return false;
    }
  }
  return true;
}

/// The trace-pairing adjoint of K: J(a) = sum_i Tr(K(b_i) a) b_i / Tr(b_i^2).
inline LinearMapTable jordan_from_kadison(const LinearMapTable& k) {
  const auto basis = hermitian_basis(k.dim());
  return LinearMapTable::from_function(k.dim(), [&](const Matrix& a) {
    Matrix out = zeros(k.dim());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double w = (k.images()[i] * a).trace().real();
      out += (w / (basis[i] * basis[i]).trace().real()) * basis[i];
    }
    return out;
  });
}

// ---------------------------------------------------------------------------
// Finite map tables

inline bool same_point(const Matrix& a, const Matrix& b, double tol) {
  return approx_equal(a, b, tol);
}
inline bool same_point(const AlgebraElement& a, const AlgebraElement& b, double tol) {
  return approx_equal(a, b, tol);
}
inline bool same_point(const Resolution& a, const Resolution& b, double tol) {
  Tolerance t;
  t.eq_tol = tol;
  t.cluster_tol = std::max(t.cluster_tol, tol);
  return same_subalgebra(a, b, t);
}

/// Finitely many (input, output) pairs, looked up by tolerance-equality.
template <typename T>
class MapTable {
 public:
  MapTable() = default;
  explicit MapTable(double tol) : tol_(tol) {}

  void add(T in, T out) {
    for (const auto& [i, o] : pairs_) {
      if (same_point(i, in, tol_)) throw PreconditionError("MapTable: duplicate input");
    }
    pairs_.emplace_back(std::move(in), std::move(out));
  }

  std::optional<T> find(const T& x) const {
    for (const auto& [i, o] : pairs_) {
      if (same_point(i, x, tol_)) return o;
    }
    return std::nullopt;
  }

  T operator()(const T& x) const {
    auto r = find(x);
    if (!r) throw UndefinedInput("MapTable: input not in table");
    return *r;
  }

  const std::vector<std::pair<T, T>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

 private:
  double tol_ = 1e-9;
  std::vector<std::pair<T, T>> pairs_;
};

using WignerMapSample = MapTable<Matrix>;
using ProjectionMapTable = MapTable<Matrix>;
using LatticeMapTable = MapTable<Resolution>;

// ---------------------------------------------------------------------------
// Pure states and density matrices

/// Tr(ef) for rank-one projections, in [0, 1].
inline double transition_probability(const Matrix& e, const Matrix& f, const Tolerance& tol = {}) {
  require_same_dim(e, f, "transition_probability");
  if (!is_rank_one_projection(e, tol) || !is_rank_one_projection(f, tol)) {
    throw PreconditionError("transition_probability: arguments must be rank-one projections");
  }
  return std::clamp((e * f).trace().real(), 0.0, 1.0);
}

inline Matrix wigner_apply(const Generator& g, const Matrix& e, const Tolerance& tol = {}) {
  if (!is_rank_one_projection(e, tol)) {
    throw PreconditionError("wigner_apply: e must be a rank-one projection");
  }
  return g.act(e);
}

class DensityMatrix {
 public:
  static DensityMatrix make(Matrix rho, const Tolerance& tol = {}) {
    if (!is_self_adjoint(rho, tol.eq_tol)) throw PreconditionError("DensityMatrix: not self-adjoint");
    if (std::abs(rho.trace().real() - 1.0) > tol.eq_tol) {
      throw PreconditionError("DensityMatrix: trace is not one");
    }
    if (hermitian_eigen(rho).values.minCoeff() < -tol.eq_tol) {
      throw PreconditionError("DensityMatrix: not positive");
    }
    DensityMatrix d;
    d.rho_ = std::move(rho);
    return d;
  }

  const Matrix& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

 private:
  Matrix rho_;
};

/// rho = sum_i lambda_i |v_i><v_i| with orthonormal v_i.
struct EigenExpansion {
  std::vector<double> weights;
  std::vector<Vector> vectors;
};

/// Eigenbasis of rho, each degenerate eigenspace rotated by an independent
/// Haar unitary so that different seeds give different refinements.
inline EigenExpansion random_eigen_expansion(const DensityMatrix& rho, Rng& rng,
                                             const Tolerance& tol = {}) {
  const auto eig = hermitian_eigen(rho.matrix());
  EigenExpansion out;
  for (auto [begin, end] : cluster_eigenvalues(eig.values, tol.cluster_tol)) {
    const int m = end - begin;
    const Matrix rotated = eig.vectors.middleCols(begin, m) * random_unitary(m, rng);
    const double lambda = eig.values.segment(begin, m).mean();
    for (int c = 0; c < m; ++c) {
      out.weights.push_back(lambda);
      out.vectors.push_back(rotated.col(c));
    }
  }
  return out;
}

inline EigenExpansion eigen_expansion(const DensityMatrix& rho) {
  const auto eig = hermitian_eigen(rho.matrix());
  EigenExpansion out;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    out.weights.push_back(eig.values[i]);
    out.vectors.push_back(eig.vectors.col(i));
  }
  return out;
}

/// K(rho) = sum_i lambda_i W(e_{v_i}) for a chosen eigen-expansion.
template <typename W>
Matrix kadison_from_wigner(const W& w, const EigenExpansion& expansion) {
  const int n = static_cast<int>(expansion.vectors.front().size());
  Matrix out = zeros(n);
  for (std::size_t i = 0; i < expansion.vectors.size(); ++i) {
    if (expansion.weights[i] == 0.0) continue;
    out += expansion.weights[i] * w(rank_one_projection(expansion.vectors[i]));
  }
  return out;
}

template <typename W>
Matrix kadison_from_wigner(const W& w, const DensityMatrix& rho) {
  return kadison_from_wigner(w, eigen_expansion(rho));
}

/// The Wigner map e -> g(e) as a callable.
inline auto wigner_of(const Generator& g) {
  return [g](const Matrix& e) { return g.act(e); };
}

// ---------------------------------------------------------------------------
// Effects

using EffectMap = std::function<Matrix(const Matrix&)>;

/// J restricted to effects; rejects non-effect inputs.
inline EffectMap ludwig_restrict(const LinearMapTable& j, const Tolerance& tol = {}) {
  return [j, tol](const Matrix& a) {
    if (!is_effect(a, tol)) throw PreconditionError("ludwig map: input is not an effect");
    return j.apply(a);
  };
}

/// Linear extension of an effect map: with b = (a + s)/(2s) for any
/// s >= ||a||, J(a) = 2s L(b) - s. Defaults to s = ||a||.
inline Matrix jordan_from_ludwig(const EffectMap& l, const Matrix& a, const Tolerance& tol = {},
                                 std::optional<double> scale = std::nullopt) {
  require_square(a, "jordan_from_ludwig");
  if (!is_self_adjoint(a, tol.eq_tol)) {
    throw PreconditionError("jordan_from_ludwig: a is not self-adjoint");
  }
  const int n = static_cast<int>(a.rows());
  const double norm = op_norm(a);
  if (norm == 0.0) return zeros(n);
  const double s = scale.value_or(norm);
  if (s < norm) throw PreconditionError("jordan_from_ludwig: scale below ||a||");
  const Matrix b = (a + s * identity(n)) / (2.0 * s);
  const Matrix lb = l(b);
  if (!is_effect(lb, tol)) throw PreconditionError("jordan_from_ludwig: L(b) is not an effect");
  return 2.0 * s * lb - s * identity(n);
}

// ---------------------------------------------------------------------------
// Projections

/// J(a) = sum_j lambda_j N(f_j) over the spectral decomposition of a.
template <typename N>
Matrix vonneumann_extend(const N& map, const Matrix& a, const Tolerance& tol = {}) {
  const auto s = spectral(a, tol);
  Matrix out = zeros(static_cast<int>(a.rows()));
  for (std::size_t j = 0; j < s.projections.size(); ++j) {
    out += s.eigenvalues[j] * map(s.projections[j]);
  }
  return out;
}

inline auto projection_map_of(const Generator& g) {
  return [g](const Matrix& e) { return g.act(e); };
}

/// A projection map on M_2 that preserves orthocomplements (hence is an
/// order isomorphism of P(C^2)) but is not induced by any (anti)unitary:
/// each rank-one projection's Bloch vector is rotated about the z-axis by
/// strength * z^2. Its spectral extension is not additive.
inline auto qubit_twist_map(double strength) {
  return [strength](const Matrix& p) -> Matrix {
    if (p.rows() != 2 || p.cols() != 2) throw DimensionMismatch("qubit_twist_map: needs 2x2 input");
    const int rank = projection_rank(p);
    if (rank != 1) return p;
    const double x = 2.0 * p(0, 1).real();
    const double y = -2.0 * p(0, 1).imag();
    const double z = 2.0 * p(0, 0).real() - 1.0;
    const double theta = strength * z * z;
    const double xr = x * std::cos(theta) - y * std::sin(theta);
    const double yr = x * std::sin(theta) + y * std::cos(theta);
    Matrix out(2, 2);
    out << 0.5 * (1.0 + z), 0.5 * Complex(xr, -yr), 0.5 * Complex(xr, yr), 0.5 * (1.0 - z);
    return out;
  };
}

// ---------------------------------------------------------------------------
// Subalgebras

/// B(C) = J_C(C): images of the minimal projections, re-canonicalized.
inline Resolution bohr_from_jordan(const LinearMapTable& j, const Resolution& c,
                                   const Tolerance& tol = {}) {
  if (j.dim() != c.shape().total()) throw DimensionMismatch("bohr_from_jordan");
  std::vector<AlgebraElement> images;
  for (const auto& p : c.projections()) {
    images.push_back(AlgebraElement::from_full(c.shape(), complexify(j, p.to_full()),
                                               std::max(1e-7, tol.eq_tol)));
  }
  return Resolution::make(c.shape(), std::move(images), tol);
}

// ---------------------------------------------------------------------------
// Phases and transition-probability infima

/// z with g2.u = z g1.u, if such a unit scalar exists. Generators of
/// different kinds are never phase-equivalent.
inline std::optional<Complex> phase_equivalence(const Generator& g1, const Generator& g2,
                                                double tol = 1e-9) {
  require_same_dim(g1.u, g2.u, "phase_equivalence");
  if (g1.antiunitary != g2.antiunitary) return std::nullopt;
  const Complex overlap = (g1.u.adjoint() * g2.u).trace() / static_cast<double>(g1.dim());
  const double mag = std::abs(overlap);
  if (mag < 0.5) return std::nullopt;
  const Complex z = overlap / mag;
  if (op_norm(g2.u - z * g1.u) > tol) return std::nullopt;
  return z;
}

/// min Tr(e a) over sampled a = f + (1-f) b (1-f), b a random effect; the
/// first sample is b = 0, i.e. a = f.
inline double tp_infimum_estimate(const Matrix& e, const Matrix& f, int samples,
                                  std::uint64_t seed, const Tolerance& tol = {}) {
  require_same_dim(e, f, "tp_infimum_estimate");
  if (!is_rank_one_projection(e, tol) || !is_rank_one_projection(f, tol)) {
    throw PreconditionError("tp_infimum_estimate: arguments must be rank-one projections");
  }
  const int n = static_cast<int>(e.rows());
  const Matrix fperp = identity(n) - f;
  Rng rng(seed);
  double best = (e * f).trace().real();
  for (int s = 0; s < samples; ++s) {
    const Matrix a = f + fperp * random_effect(n, rng) * fperp;
    best = std::min(best, (e * a).trace().real());
  }
  return best;
}

}  // namespace bohrlat
