#pragma once

// The poset C(A) of unital commutative *-subalgebras of a finite-dimensional
// A = (+) M_{n_i}. Each element is spanned by exactly one resolution of the
// identity (its minimal projections), which is the representation used here.

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "bohrlat/algcore.hpp"
#include "bohrlat/partitions.hpp"

namespace bohrlat {

/// Mutually orthogonal nonzero projections summing to 1, kept in canonical
/// order.
class Resolution {
 public:
  Resolution() = default;

  /// Validates and canonicalizes. Throws PreconditionError on any violated
  /// invariant.
  static Resolution make(const AlgebraShape& shape, std::vector<AlgebraElement> projections,
                         const Tolerance& tol = {}) {
    if (projections.empty()) throw PreconditionError("Resolution: no projections");
    AlgebraElement sum = AlgebraElement::zero(shape);
    for (const auto& p : projections) {
      if (!(p.shape() == shape)) throw DimensionMismatch("Resolution: shape mismatch");
      if (!is_projection(p, tol)) throw PreconditionError("Resolution: member is not a projection");
      // A projection has trace >= 1 unless it vanishes.
      if (p.trace().real() < 0.5) throw PreconditionError("Resolution: zero or degenerate projection");
      sum = sum + p;
    }
    for (std::size_t i = 0; i < projections.size(); ++i) {
      for (std::size_t j = i + 1; j < projections.size(); ++j) {
        if (!is_zero(projections[i] * projections[j], tol.eq_tol)) {
          throw PreconditionError("Resolution: projections are not mutually orthogonal");
        }
      }
    }
    if (!approx_equal(sum, AlgebraElement::unit(shape), tol.eq_tol)) {
      throw PreconditionError("Resolution: projections do not sum to the identity");
    }
    Resolution r;
    r.shape_ = shape;
    r.projections_ = std::move(projections);
    r.canonicalize();
    return r;
  }

  /// {1_A}.
  static Resolution bottom(const AlgebraShape& shape) {
    return make(shape, {AlgebraElement::unit(shape)});
  }

  /// The diagonal matrix units of every block: a maximal abelian subalgebra.
  static Resolution diagonal(const AlgebraShape& shape) {
    std::vector<AlgebraElement> ps;
    for (int b = 0; b < shape.block_count(); ++b) {
      for (int i = 0; i < shape.blocks[b]; ++i) {
        auto e = AlgebraElement::zero(shape);
        std::vector<Matrix> blocks = e.blocks();
        blocks[b](i, i) = 1.0;
        ps.emplace_back(shape, std::move(blocks));
      }
    }
    return make(shape, std::move(ps));
  }

  const AlgebraShape& shape() const { return shape_; }
  const std::vector<AlgebraElement>& projections() const { return projections_; }
  const AlgebraElement& operator[](int i) const { return projections_[i]; }
  int size() const { return static_cast<int>(projections_.size()); }

  /// Conjugates every projection: p -> u p u*, blockwise.
  Resolution conjugated(const AlgebraElement& u, const Tolerance& tol = {}) const {
    std::vector<AlgebraElement> ps;
    for (const auto& p : projections_) ps.push_back(u * p * u.adjoint());
    return make(shape_, std::move(ps), tol);
  }

 private:
  static double rounded(double x) {
    const double r = std::round(x * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;  // fold -0
  }

  static std::vector<double> sort_key(const AlgebraElement& p) {
    std::vector<double> key;
    for (const auto& b : p.blocks()) key.push_back(rounded(b.trace().real()));
    for (const auto& b : p.blocks()) {
      for (Eigen::Index i = 0; i < b.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
          key.push_back(rounded(b(i, j).real()));
          key.push_back(rounded(b(i, j).imag()));
        }
      }
    }
    return key;
  }

  void canonicalize() {
    std::vector<std::pair<std::vector<double>, AlgebraElement>> keyed;
    for (auto& p : projections_) keyed.emplace_back(sort_key(p), std::move(p));
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    projections_.clear();
    for (auto& [k, p] : keyed) projections_.push_back(std::move(p));
  }

  AlgebraShape shape_;
  std::vector<AlgebraElement> projections_;
};

namespace detail {

inline void require_same_shape(const Resolution& c, const Resolution& d, const char* what) {
  if (!(c.shape() == d.shape())) {
    throw DimensionMismatch(std::string(what) + ": shape mismatch");
  }
}

/// Indices of the d-projections lying under p (q <= p iff qp = q).
inline std::vector<int> parts_below(const AlgebraElement& p, const Resolution& d,
                                    double tol) {
  std::vector<int> out;
  for (int j = 0; j < d.size(); ++j) {
    if (approx_equal(d[j] * p, d[j], tol)) out.push_back(j);
  }
  return out;
}

inline AlgebraElement sum_of(const Resolution& d, const std::vector<int>& idx) {
  AlgebraElement s = AlgebraElement::zero(d.shape());
  for (int j : idx) s = s + d[j];
  return s;
}

}  // namespace detail

/// p lies in span(d) iff it is the sum of the d-projections below it.
inline bool in_span(const AlgebraElement& p, const Resolution& d, const Tolerance& tol = {}) {
  return approx_equal(p, detail::sum_of(d, detail::parts_below(p, d, tol.eq_tol)),
                      tol.eq_tol);
}

/// span(c) is contained in span(d).
inline bool subalgebra_leq(const Resolution& c, const Resolution& d, const Tolerance& tol = {}) {
  detail::require_same_shape(c, d, "subalgebra_leq");
  for (const auto& p : c.projections()) {
    if (!in_span(p, d, tol)) return false;
  }
  return true;
}

/// Same subalgebra: equal projection sets.
inline bool same_subalgebra(const Resolution& c, const Resolution& d, const Tolerance& tol = {}) {
  if (!(c.shape() == d.shape()) || c.size() != d.size()) return false;
  for (const auto& p : c.projections()) {
    bool found = false;
    for (const auto& q : d.projections()) {
      if (approx_equal(p, q, tol.eq_tol)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

/// Resolution of C*(a, 1) for normal a: joint spectral projections of the
/// real and imaginary parts.
inline Resolution generated_subalgebra(const AlgebraElement& a, const Tolerance& tol = {}) {
  const Matrix full = a.to_full();
  if (!is_normal(full, tol.eq_tol)) {
    throw PreconditionError("generated_subalgebra: element is not normal");
  }
  const Matrix re = 0.5 * (full + full.adjoint());
  const Matrix im = Complex(0.0, -0.5) * (full - full.adjoint());
  const auto sre = spectral(re, tol);
  const auto sim = spectral(im, tol);
  std::vector<AlgebraElement> ps;
  for (const auto& p : sre.projections) {
    for (const auto& q : sim.projections) {
      const Matrix pq = p * q;
      if (pq.trace().real() < 0.5) continue;
      ps.push_back(AlgebraElement::from_full(a.shape(), 0.5 * (pq + pq.adjoint()),
                                             std::max(1e-7, tol.eq_tol)));
    }
  }
  return Resolution::make(a.shape(), std::move(ps), tol);
}

/// Threshold below which two projections count as orthogonal when building
/// the overlap graph.
inline constexpr double kOverlapCutoff = 1e-7;

/// span(c) ∩ span(d): sums over connected components of the graph joining
/// c_i and d_j whenever c_i d_j != 0.
inline Resolution meet_subalgebras(const Resolution& c, const Resolution& d,
                                   const Tolerance& tol = {}) {
  detail::require_same_shape(c, d, "meet_subalgebras");
  const int k = c.size(), m = d.size();
  std::vector<int> parent(k + m);
  for (int i = 0; i < k + m; ++i) parent[i] = i;
  const double cutoff = std::max(kOverlapCutoff, tol.eq_tol);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!is_zero(c[i] * d[j], cutoff)) {
        parent[detail::find_root(parent, i)] = detail::find_root(parent, k + j);
      }
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> group_of(k + m, -1);
  for (int i = 0; i < k; ++i) {
    const int r = detail::find_root(parent, i);
    if (group_of[r] == -1) {
      group_of[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of[r]].push_back(i);
  }
  std::vector<AlgebraElement> ps;
  for (const auto& g : groups) ps.push_back(detail::sum_of(c, g));
  return Resolution::make(c.shape(), std::move(ps), tol);
}

/// Atoms of C(A) are the C*(e) for proper projections e.
inline bool is_atom(const Resolution& c) { return c.size() == 2; }

inline bool is_maximal_abelian(const Resolution& c) {
  if (c.size() != c.shape().total()) return false;
  for (const auto& p : c.projections()) {
    if (projection_rank(p) != 1) return false;
  }
  return true;
}

struct CornerDims {
  int eAe = 0;  // dim(eAe) = sum_i rank(e_i)^2
  int eCe = 0;  // dim(eCe); zero when no subalgebra was supplied
};

/// dim(eAe) for a projection e in A.
inline int corner_dim(const AlgebraElement& e, const Tolerance& tol = {}) {
  if (!is_projection(e, tol)) throw PreconditionError("corner_dims: e is not a projection");
  int d = 0;
  for (int r : block_ranks(e)) d += r * r;
  return d;
}

inline CornerDims corner_dims(const AlgebraElement& e, const AlgebraShape& shape,
                              const Tolerance& tol = {}) {
  if (!(e.shape() == shape)) throw DimensionMismatch("corner_dims: shape mismatch");
  return {corner_dim(e, tol), 0};
}

/// Also counts dim(eCe): the c-projections under e.
inline CornerDims corner_dims(const AlgebraElement& e, const Resolution& c,
                              const Tolerance& tol = {}) {
  if (!(e.shape() == c.shape())) throw DimensionMismatch("corner_dims: shape mismatch");
  const int eAe = corner_dim(e, tol);
  const auto below = detail::parts_below(e, c, tol.eq_tol);
  if (!approx_equal(e, detail::sum_of(c, below), tol.eq_tol)) {
    throw PreconditionError("corner_dims: e does not lie in the subalgebra");
  }
  return {eAe, static_cast<int>(below.size())};
}

/// For c <= d: the partition of d's index set whose blocks are the
/// d-projections under each projection of c.
inline Partition partition_relative_to(const Resolution& d, const Resolution& c,
                                       const Tolerance& tol = {}) {
  detail::require_same_shape(c, d, "partition_relative_to");
  std::vector<int> labels(d.size(), -1);
  for (int i = 0; i < c.size(); ++i) {
    const auto below = detail::parts_below(c[i], d, tol.eq_tol);
    if (!approx_equal(c[i], detail::sum_of(d, below), tol.eq_tol)) {
      throw PreconditionError("partition_relative_to: c is not below d");
    }
    for (int j : below) labels[j] = i;
  }
  return Partition::from_labels(std::span<const int>(labels));
}

/// The bridge from the down-set of a maximal abelian d to Part(|d|). Finer
/// partitions correspond to larger subalgebras.
inline Partition down_set_to_partition(const Resolution& d, const Resolution& c,
                                       const Tolerance& tol = {}) {
  if (!is_maximal_abelian(d)) {
    throw PreconditionError("down_set_to_partition: d is not maximal abelian");
  }
  return partition_relative_to(d, c, tol);
}

/// Inverse bridge: block B of p becomes the projection sum_{j in B} d_j.
inline Resolution partition_to_subalgebra(const Resolution& d, const Partition& p,
                                          const Tolerance& tol = {}) {
  if (p.size() != d.size()) {
    throw DimensionMismatch("partition_to_subalgebra: partition size differs from |d|");
  }
  std::vector<AlgebraElement> ps;
  for (const auto& block : p.blocks()) ps.push_back(detail::sum_of(d, block));
  return Resolution::make(d.shape(), std::move(ps), tol);
}

/// Every subalgebra below d, in the lexicographic order of the partitions
/// that index them.
inline std::vector<Resolution> down_set(const Resolution& d, const Tolerance& tol = {}) {
  std::vector<Resolution> out;
  for (const auto& p : enumerate_partitions(d.size())) {
    out.push_back(partition_to_subalgebra(d, p, tol));
  }
  return out;
}

}  // namespace bohrlat
