#pragma once

// The orthomodular poset P(A) of projections, handled through predicates on
// individual projections plus finite sample families. Boolean subalgebras
// are generated by resolutions of the identity.

#include <Eigen/SVD>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "bohrlat/csub.hpp"

namespace bohrlat {

/// Projections of a given algebra, optionally with a finite family under
/// study.
struct ProjectionPoset {
  AlgebraShape shape;
  std::vector<AlgebraElement> sample;

  void validate(const Tolerance& tol = {}) const {
    for (const auto& p : sample) {
      if (!(p.shape() == shape) || !is_projection(p, tol)) {
        throw PreconditionError("ProjectionPoset: sample member is not a projection of A");
      }
    }
  }
};

/// p <= q iff pq = p.
inline bool proj_leq(const AlgebraElement& p, const AlgebraElement& q, const Tolerance& tol = {}) {
  return approx_equal(p * q, p, tol.eq_tol);
}

inline AlgebraElement ortho(const AlgebraElement& p) {
  return AlgebraElement::unit(p.shape()) - p;
}

/// p v q for p <= q⊥, which equals p + q.
inline AlgebraElement join_orthogonal(const AlgebraElement& p, const AlgebraElement& q,
                                      const Tolerance& tol = {}) {
  if (!proj_leq(p, ortho(q), tol)) {
    throw PreconditionError("join_orthogonal: p is not orthogonal to q");
  }
  return p + q;
}

/// Singular values below this count as zero when intersecting ranges.
inline constexpr double kRangeRankCutoff = 1e-7;

namespace detail {

/// Orthonormal basis of the range of a projection.
inline Matrix range_basis(const Matrix& p) {
  const auto eig = hermitian_eigen(p);
  int first = 0;
  while (first < eig.values.size() && eig.values[first] < 0.5) ++first;
  return eig.vectors.rightCols(eig.values.size() - first);
}

/// Projection onto range(p) ∩ range(q) in one block.
inline Matrix range_meet(const Matrix& p, const Matrix& q) {
  const int n = static_cast<int>(p.rows());
  const Matrix bp = range_basis(p), bq = range_basis(q);
  if (bp.cols() == 0 || bq.cols() == 0) return zeros(n);
  // x = bp a = bq b  <=>  [bp, -bq] (a; b) = 0.
  Matrix stacked(n, bp.cols() + bq.cols());
  stacked << bp, -bq;
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Matrix& v = svd.matrixV();
  Matrix span(n, 0);
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double s = i < sv.size() ? sv[i] : 0.0;
    if (s < kRangeRankCutoff) {
      span.conservativeResize(n, span.cols() + 1);
      span.col(span.cols() - 1) = bp * v.col(i).head(bp.cols());
    }
  }
  if (span.cols() == 0) return zeros(n);
  // Orthonormalize the intersection vectors.
  Eigen::JacobiSVD<Matrix> orth(span, Eigen::ComputeThinU);
  Matrix result = zeros(n);
  for (Eigen::Index i = 0; i < orth.singularValues().size(); ++i) {
    if (orth.singularValues()[i] > kRangeRankCutoff) {
      const Vector u = orth.matrixU().col(i);
      result += u * u.adjoint();
    }
  }
  return result;
}

}  // namespace detail

/// p ∧ q: the projection onto the intersection of ranges. Works for
/// non-commuting p, q.
inline AlgebraElement proj_meet(const AlgebraElement& p, const AlgebraElement& q) {
  if (!(p.shape() == q.shape())) throw DimensionMismatch("proj_meet: shape mismatch");
  std::vector<Matrix> blocks;
  for (int i = 0; i < p.shape().block_count(); ++i) {
    blocks.push_back(detail::range_meet(p.block(i), q.block(i)));
  }
  return {p.shape(), std::move(blocks)};
}

/// The orthomodular law q = p v (p⊥ ∧ q) for p <= q.
inline bool orthomodular_check(const AlgebraElement& p, const AlgebraElement& q,
                               const Tolerance& tol = {}) {
  if (!is_projection(p, tol) || !is_projection(q, tol)) {
    throw PreconditionError("orthomodular_check: arguments must be projections");
  }
  if (!proj_leq(p, q, tol)) throw PreconditionError("orthomodular_check: requires p <= q");
  const AlgebraElement m = proj_meet(ortho(p), q);
  const AlgebraElement diff = q - p;
  if (!is_projection(diff, tol)) return false;
  if (!approx_equal(m, diff, tol.eq_tol)) return false;
  if (!proj_leq(p, ortho(m), tol)) return false;
  return approx_equal(join_orthogonal(p, m, tol), q, tol.eq_tol);
}

/// The 2^k sums of subsets of a resolution's projections.
class BooleanSubalgebra {
 public:
  static constexpr int kMaxGenerators = 16;

  explicit BooleanSubalgebra(Resolution generators) : generators_(std::move(generators)) {
    const int k = generators_.size();
    if (k > kMaxGenerators) {
      throw PreconditionError("BooleanSubalgebra: more than 16 generators");
    }
    const std::uint32_t count = std::uint32_t{1} << k;
    elements_.reserve(count);
    for (std::uint32_t mask = 0; mask < count; ++mask) {
      AlgebraElement e = AlgebraElement::zero(generators_.shape());
      for (int j = 0; j < k; ++j) {
        if (mask & (std::uint32_t{1} << j)) e = e + generators_[j];
      }
      elements_.push_back(std::move(e));
    }
  }

  const Resolution& generators() const { return generators_; }
  const std::vector<AlgebraElement>& elements() const { return elements_; }
  int size() const { return static_cast<int>(elements_.size()); }

  bool contains(const AlgebraElement& p, const Tolerance& tol = {}) const {
    for (const auto& e : elements_) {
      if (approx_equal(e, p, tol.eq_tol)) return true;
    }
    return false;
  }

 private:
  Resolution generators_;
  std::vector<AlgebraElement> elements_;
};

inline BooleanSubalgebra boolean_of_resolution(const Resolution& c) {
  return BooleanSubalgebra(c);
}

/// Atoms of b, found from its elements alone: scanning by increasing
/// trace, a nonzero element is an atom iff it is orthogonal to every atom
/// found so far.
inline Resolution resolution_of_boolean(const BooleanSubalgebra& b, const Tolerance& tol = {}) {
  std::vector<const AlgebraElement*> nonzero;
  for (const auto& e : b.elements()) {
    if (e.trace().real() >= 0.5) nonzero.push_back(&e);
  }
  std::stable_sort(nonzero.begin(), nonzero.end(), [](const auto* x, const auto* y) {
    return x->trace().real() < y->trace().real() - 0.5;
  });
  std::vector<AlgebraElement> found;
  for (const auto* e : nonzero) {
    bool orthogonal = true;
    for (const auto& a : found) {
      if (!is_zero(*e * a, tol.eq_tol)) {
        orthogonal = false;
        break;
      }
    }
    if (orthogonal) found.push_back(*e);
  }
  return Resolution::make(b.generators().shape(), std::move(found), tol);
}

/// b1 ⊆ b2 as sets of projections.
inline bool boolean_subset(const BooleanSubalgebra& b1, const BooleanSubalgebra& b2,
                           const Tolerance& tol = {}) {
  for (const auto& e : b1.elements()) {
    if (!b2.contains(e, tol)) return false;
  }
  return true;
}

struct IsoViolation {
  int left = 0, right = 0;
  bool subalgebra_leq = false;
  bool boolean_subset = false;
};

struct BooleanIsoReport {
  int family_size = 0;
  int pairs_checked = 0;
  bool meet_closed = true;
  std::vector<IsoViolation> violations;

  bool ok() const { return meet_closed && violations.empty(); }
};

/// Checks c <= d  <=>  P(c) ⊆ P(d) over every ordered pair of the family.
inline BooleanIsoReport boolean_poset_iso_check(const AlgebraShape& shape,
                                                const std::vector<Resolution>& family,
                                                const Tolerance& tol = {}) {
  BooleanIsoReport report;
  report.family_size = static_cast<int>(family.size());
  std::vector<BooleanSubalgebra> algebras;
  for (const auto& c : family) {
    if (!(c.shape() == shape)) throw DimensionMismatch("boolean_poset_iso_check: shape mismatch");
    algebras.push_back(boolean_of_resolution(c));
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = 0; j < family.size(); ++j) {
      ++report.pairs_checked;
      const bool leq = subalgebra_leq(family[i], family[j], tol);
      const bool sub = boolean_subset(algebras[i], algebras[j], tol);
      if (leq != sub) {
        report.violations.push_back({static_cast<int>(i), static_cast<int>(j), leq, sub});
      }
      if (j > i) {
        const Resolution m = meet_subalgebras(family[i], family[j], tol);
        bool present = false;
        for (const auto& c : family) present = present || same_subalgebra(c, m, tol);
        report.meet_closed = report.meet_closed && present;
      }
    }
  }
  return report;
}

/// Boolean subalgebras of the power set of {0..n-1} (the diagonal
/// projections of C^n), found by closing families of subset masks under
/// complement and union. Each result is a sorted list of masks.
inline std::vector<std::vector<std::uint32_t>> enumerate_diagonal_boolean_subalgebras(int n) {
  if (n < 1 || n > 5) throw PreconditionError("enumerate_diagonal_boolean_subalgebras: n in [1, 5]");
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  auto close = [&](std::set<std::uint32_t> s) {
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<std::uint32_t> cur(s.begin(), s.end());
      for (auto a : cur) {
        if (s.insert(full & ~a).second) grew = true;
        for (auto b : cur) {
          if (s.insert(a | b).second) grew = true;
        }
      }
    }
    return std::vector<std::uint32_t>(s.begin(), s.end());
  };
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<std::vector<std::uint32_t>> frontier{close({0, full})};
  seen.insert(frontier.front());
  while (!frontier.empty()) {
    auto cur = std::move(frontier.back());
    frontier.pop_back();
    for (std::uint32_t m = 0; m <= full; ++m) {
      if (std::binary_search(cur.begin(), cur.end(), m)) continue;
      std::set<std::uint32_t> s(cur.begin(), cur.end());
      s.insert(m);
      auto next = close(std::move(s));
      if (seen.insert(next).second) frontier.push_back(std::move(next));
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace bohrlat
