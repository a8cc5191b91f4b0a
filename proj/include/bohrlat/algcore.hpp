#pragma once

// Dense complex matrices, finite direct sums of matrix algebras, and the
// spectral machinery everything else is built on.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "bohrlat/errors.hpp"

namespace bohrlat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Numerical thresholds shared by every structural predicate.
struct Tolerance {
  double eq_tol = 1e-9;       // structural predicates and matrix equality
  double cluster_tol = 1e-8;  // eigenvalue grouping
  double report_tol = 1e-8;   // acceptance comparisons

  void validate() const {
    if (!(eq_tol > 0) || !(cluster_tol > 0) || !(report_tol > 0)) {
      throw PreconditionError("tolerances must be strictly positive");
    }
    if (cluster_tol < eq_tol) {
      throw PreconditionError("cluster_tol must be >= eq_tol");
    }
  }

  /// Sets eq_tol and report_tol together, raising cluster_tol if needed.
  static Tolerance uniform(double tol) {
    Tolerance t;
    t.eq_tol = tol;
    t.report_tol = tol;
    t.cluster_tol = std::max(t.cluster_tol, tol);
    return t;
  }
};

// ---------------------------------------------------------------------------
// Elementary constructors

inline Matrix identity(int n) { return Matrix::Identity(n, n); }

inline Matrix zeros(int n) { return Matrix::Zero(n, n); }

/// E_jk: one at (j, k), zero elsewhere.
inline Matrix matrix_unit(int n, int j, int k) {
  Matrix e = Matrix::Zero(n, n);
  e(j, k) = 1.0;
  return e;
}

/// |v><v| / <v|v>.
inline Matrix rank_one_projection(const Vector& v) {
  const double norm2 = v.squaredNorm();
  if (norm2 <= 0.0) throw PreconditionError("rank_one_projection: zero vector");
  return v * v.adjoint() / norm2;
}

inline Matrix diagonal(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = values[i];
  return d;
}

inline void require_same_dim(const Matrix& a, const Matrix& b,
                             const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch");
  }
}

inline void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionMismatch(std::string(what) + ": matrix must be square");
  }
}

// ---------------------------------------------------------------------------
// Eigenroutine and norms

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns are eigenvectors
};

/// Eigen-decomposition of the Hermitian part of `a`. The one numerical
/// kernel: norms, spectra and ranks all go through here.
inline HermitianEigen hermitian_eigen(const Matrix& a) {
  require_square(a, "hermitian_eigen");
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eigen: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Largest singular value, computed from the spectrum of a*a.
inline double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const double fro = a.norm();
  if (fro == 0.0) return 0.0;
  const Matrix gram = a.adjoint() * a;
  const double top = hermitian_eigen(gram).values.maxCoeff();
  // Operator norm lies in [fro / sqrt(n), fro].
  const double lower = fro / std::sqrt(static_cast<double>(a.cols()));
  return std::clamp(std::sqrt(std::max(top, 0.0)), lower, fro);
}

/// ||a - b|| <= tol in operator norm. Frobenius bounds settle most cases
/// without an eigen-solve.
inline bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const Matrix d = a - b;
  const double fro = d.norm();
  if (fro <= tol) return true;
  if (fro > tol * std::sqrt(static_cast<double>(d.cols()))) return false;
  return op_norm(d) <= tol;
}

inline bool is_self_adjoint(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return approx_equal(a, a.adjoint(), tol);
}

inline bool is_normal(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return approx_equal(a.adjoint() * a, a * a.adjoint(), tol);
}

inline bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const Matrix one = identity(static_cast<int>(u.rows()));
  return approx_equal(u.adjoint() * u, one, tol) &&
         approx_equal(u * u.adjoint(), one, tol);
}

inline bool is_projection(const Matrix& p, const Tolerance& tol = {}) {
  if (p.rows() != p.cols() || p.rows() == 0) return false;
  return approx_equal(p * p, p, tol.eq_tol) &&
         approx_equal(p, p.adjoint(), tol.eq_tol);
}

/// 0 <= a <= 1.
inline bool is_effect(const Matrix& a, const Tolerance& tol = {}) {
  if (!is_self_adjoint(a, tol.eq_tol)) return false;
  const auto eig = hermitian_eigen(a);
  return eig.values.minCoeff() >= -tol.eq_tol &&
         eig.values.maxCoeff() <= 1.0 + tol.eq_tol;
}

/// Rank of a projection, read off its trace.
inline int projection_rank(const Matrix& p) {
  return static_cast<int>(std::lround(p.trace().real()));
}

inline bool is_rank_one_projection(const Matrix& p, const Tolerance& tol = {}) {
  return is_projection(p, tol) && std::abs(p.trace().real() - 1.0) <= 1e-6;
}

/// a o b = (ab + ba) / 2.
inline Matrix jordan_product(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "jordan_product");
  return 0.5 * (a * b + b * a);
}

/// Sum of singular values.
inline double trace_norm(const Matrix& a) {
  require_square(a, "trace_norm");
  return Eigen::JacobiSVD<Matrix>(a).singularValues().sum();
}

// ---------------------------------------------------------------------------
// Spectral decomposition

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // strictly increasing
  std::vector<Matrix> projections;  // matching spectral projections

  Matrix reconstruct() const {
    Matrix sum = Matrix::Zero(projections.front().rows(),
                              projections.front().cols());
    for (std::size_t j = 0; j < projections.size(); ++j) {
      sum += eigenvalues[j] * projections[j];
    }
    return sum;
  }
};

/// Index ranges [begin, end) of sorted eigenvalues, merged greedily while
/// consecutive gaps stay below cluster_tol.
inline std::vector<std::pair<int, int>> cluster_eigenvalues(
    const Eigen::VectorXd& sorted, double cluster_tol) {
  std::vector<std::pair<int, int>> groups;
  const int n = static_cast<int>(sorted.size());
  int begin = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || sorted[i] - sorted[i - 1] >= cluster_tol) {
      groups.emplace_back(begin, i);
      begin = i;
    }
  }
  return groups;
}

inline SpectralDecomposition spectral(const Matrix& a,
                                      const Tolerance& tol = {}) {
  require_square(a, "spectral");
  if (!is_self_adjoint(a, tol.eq_tol)) {
    throw PreconditionError("spectral: matrix is not self-adjoint");
  }
  const auto eig = hermitian_eigen(a);
  SpectralDecomposition out;
  for (auto [begin, end] : cluster_eigenvalues(eig.values, tol.cluster_tol)) {
    const auto block = eig.vectors.middleCols(begin, end - begin);
    out.eigenvalues.push_back(eig.values.segment(begin, end - begin).mean());
    out.projections.push_back(block * block.adjoint());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite direct sums of matrix algebras

/// Block sizes (n_1, ..., n_k) of A = M_{n_1} (+) ... (+) M_{n_k}.
struct AlgebraShape {
  std::vector<int> blocks;

  AlgebraShape() = default;
  explicit AlgebraShape(std::vector<int> b) : blocks(std::move(b)) {
    validate();
  }

  void validate() const {
    if (blocks.empty()) throw PreconditionError("AlgebraShape: no blocks");
    for (int b : blocks) {
      if (b <= 0) throw PreconditionError("AlgebraShape: block size must be positive");
    }
  }

  int block_count() const { return static_cast<int>(blocks.size()); }

  /// N = sum n_i, the dimension of the defining representation.
  int total() const { return std::accumulate(blocks.begin(), blocks.end(), 0); }

  /// Offset of block i in the block-diagonal embedding.
  int offset(int i) const {
    return std::accumulate(blocks.begin(), blocks.begin() + i, 0);
  }

  /// dim_C A = sum n_i^2.
  int algebra_dimension() const {
    int d = 0;
    for (int b : blocks) d += b * b;
    return d;
  }

  bool is_single_block() const { return blocks.size() == 1; }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(blocks[i]);
    }
    return s + ")";
  }

  friend bool operator==(const AlgebraShape&, const AlgebraShape&) = default;
};

/// A block-diagonal element (a_1, ..., a_k) of a direct sum.
class AlgebraElement {
 public:
  AlgebraElement() = default;

  AlgebraElement(AlgebraShape shape, std::vector<Matrix> blocks)
      : shape_(std::move(shape)), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != shape_.block_count()) {
      throw DimensionMismatch("AlgebraElement: block count does not match shape");
    }
    for (int i = 0; i < shape_.block_count(); ++i) {
      if (blocks_[i].rows() != shape_.blocks[i] ||
          blocks_[i].cols() != shape_.blocks[i]) {
        throw DimensionMismatch("AlgebraElement: block size does not match shape");
      }
    }
  }

  static AlgebraElement zero(const AlgebraShape& shape) {
    std::vector<Matrix> b;
    for (int n : shape.blocks) b.push_back(zeros(n));
    return {shape, std::move(b)};
  }

  static AlgebraElement unit(const AlgebraShape& shape) {
    std::vector<Matrix> b;
    for (int n : shape.blocks) b.push_back(identity(n));
    return {shape, std::move(b)};
  }

  /// Reads the diagonal blocks of a full N x N matrix; off-block entries
  /// must vanish within `tol`.
  static AlgebraElement from_full(const AlgebraShape& shape, const Matrix& m,
                                  double tol = 1e-9) {
    const int total = shape.total();
    if (m.rows() != total || m.cols() != total) {
      throw DimensionMismatch("from_full: matrix size does not match shape");
    }
    Matrix rest = m;
    std::vector<Matrix> b;
    for (int i = 0; i < shape.block_count(); ++i) {
      const int o = shape.offset(i), n = shape.blocks[i];
      b.push_back(m.block(o, o, n, n));
      rest.block(o, o, n, n).setZero();
    }
    if (rest.norm() > tol) {
      throw PreconditionError("from_full: matrix is not block diagonal for shape " +
                              shape.to_string());
    }
    return {shape, std::move(b)};
  }

  const AlgebraShape& shape() const { return shape_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(int i) const { return blocks_.at(i); }

  Matrix to_full() const {
    const int total = shape_.total();
    Matrix m = Matrix::Zero(total, total);
    for (int i = 0; i < shape_.block_count(); ++i) {
      const int o = shape_.offset(i), n = shape_.blocks[i];
      m.block(o, o, n, n) = blocks_[i];
    }
    return m;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (const auto& b : blocks_) t += b.trace();
    return t;
  }

  /// Operator norm: the largest block norm.
  double norm() const {
    double m = 0.0;
    for (const auto& b : blocks_) m = std::max(m, op_norm(b));
    return m;
  }

  AlgebraElement adjoint() const {
    return map([](const Matrix& b) -> Matrix { return b.adjoint(); });
  }

  template <typename F>
  AlgebraElement map(F&& f) const {
    std::vector<Matrix> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(f(b));
    return {shape_, std::move(out)};
  }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x + y; });
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x - y; });
  }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x * y; });
  }
  friend AlgebraElement operator*(Complex s, const AlgebraElement& a) {
    return a.map([s](const Matrix& x) -> Matrix { return s * x; });
  }

 private:
  template <typename F>
  static AlgebraElement zip(const AlgebraElement& a, const AlgebraElement& b, F&& f) {
    if (!(a.shape_ == b.shape_)) {
      throw DimensionMismatch("AlgebraElement: shape mismatch");
    }
    std::vector<Matrix> out;
    out.reserve(a.blocks_.size());
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) {
      out.push_back(f(a.blocks_[i], b.blocks_[i]));
    }
    return {a.shape_, std::move(out)};
  }

  AlgebraShape shape_;
  std::vector<Matrix> blocks_;
};

inline AlgebraElement embed(const AlgebraShape& shape, std::vector<Matrix> blocks) {
  return {shape, std::move(blocks)};
}

inline bool approx_equal(const AlgebraElement& a, const AlgebraElement& b,
                         double tol) {
  if (!(a.shape() == b.shape())) return false;
  for (int i = 0; i < a.shape().block_count(); ++i) {
    if (!approx_equal(a.block(i), b.block(i), tol)) return false;
  }
  return true;
}

inline bool is_projection(const AlgebraElement& p, const Tolerance& tol = {}) {
  for (const auto& b : p.blocks()) {
    if (!is_projection(b, tol)) return false;
  }
  return true;
}

inline bool is_zero(const AlgebraElement& a, double tol) {
  for (const auto& b : a.blocks()) {
    if (!approx_equal(b, zeros(static_cast<int>(b.rows())), tol)) return false;
  }
  return true;
}

/// Per-block ranks of a projection.
inline std::vector<int> block_ranks(const AlgebraElement& p) {
  std::vector<int> r;
  for (const auto& b : p.blocks()) r.push_back(projection_rank(b));
  return r;
}

inline int projection_rank(const AlgebraElement& p) {
  int r = 0;
  for (const auto& b : p.blocks()) r += projection_rank(b);
  return r;
}

/// e a e, computed blockwise.
inline AlgebraElement corner(const AlgebraElement& e, const AlgebraElement& a,
                             const Tolerance& tol = {}) {
  if (!(e.shape() == a.shape())) throw DimensionMismatch("corner: shape mismatch");
  if (!is_projection(e, tol)) throw PreconditionError("corner: e is not a projection");
  return e * a * e;
}

}  // namespace bohrlat
