#pragma once

// Recovering symmetries from order data: point bijections from partition
// lattice isomorphisms, weak Jordan maps glued from per-subalgebra pieces,
// (anti)unitaries from Jordan maps, and projection maps from Bohr data.

#include <Eigen/QR>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bohrlat/certificate.hpp"
#include "bohrlat/omp.hpp"
#include "bohrlat/symmetry.hpp"

namespace bohrlat {

// ---------------------------------------------------------------------------
// Commutative case

/// A finite table of partitions, meant to be an order isomorphism between
/// partition lattices (all of them, or just the single-block class).
class LatticeIsoTable {
 public:
  LatticeIsoTable() = default;
  LatticeIsoTable(int n_domain, int n_codomain) : n_domain_(n_domain), n_codomain_(n_codomain) {}

  void add(const Partition& from, const Partition& to) {
    if (from.size() != n_domain_ || to.size() != n_codomain_) {
      throw DimensionMismatch("LatticeIsoTable: entry " + from.to_string() + " -> " +
                              to.to_string() + " has the wrong ground size");
    }
    if (!map_.emplace(from, to).second) {
      throw PreconditionError("LatticeIsoTable: duplicate entry for " + from.to_string());
    }
  }

  std::optional<Partition> find(const Partition& p) const {
    auto it = map_.find(p);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  int n_domain() const { return n_domain_; }
  int n_codomain() const { return n_codomain_; }
  int size() const { return static_cast<int>(map_.size()); }
  const std::map<Partition, Partition>& entries() const { return map_; }

  bool is_total() const {
    return n_domain_ >= 1 && static_cast<std::uint64_t>(size()) == bell_number(n_domain_);
  }

  /// Injective, and p <= q iff t(p) <= t(q) over all supplied pairs.
  void validate() const {
    std::set<Partition> images;
    for (const auto& [from, to] : map_) {
      if (!images.insert(to).second) {
        throw NotOrderIsomorphism("LatticeIsoTable: two entries map to " + to.to_string());
      }
    }
    for (const auto& [p, tp] : map_) {
      for (const auto& [q, tq] : map_) {
        if (refines(p, q) != refines(tp, tq)) {
          throw NotOrderIsomorphism("LatticeIsoTable: order not preserved between " +
                                    p.to_string() + " and " + q.to_string());
        }
      }
    }
  }

  LatticeIsoTable inverse() const {
    LatticeIsoTable inv(n_codomain_, n_domain_);
    for (const auto& [from, to] : map_) inv.add(to, from);
    return inv;
  }

 private:
  int n_domain_ = 0, n_codomain_ = 0;
  std::map<Partition, Partition> map_;
};

/// The full table p -> phi_*(p).
inline LatticeIsoTable table_from_permutation(const std::vector<int>& phi) {
  const int n = static_cast<int>(phi.size());
  LatticeIsoTable t(n, n);
  for (const auto& p : enumerate_partitions(n)) t.add(p, push_forward(p, phi));
  return t;
}

/// Keeps the entries whose domain has exactly one non-singleton block.
inline LatticeIsoTable restrict_to_F2(const LatticeIsoTable& t) {
  LatticeIsoTable out(t.n_domain(), t.n_codomain());
  for (const auto& [from, to] : t.entries()) {
    if (!is_F2_direct(from)) continue;
    if (!is_F2_direct(to)) {
      throw NotOrderIsomorphism("restrict_to_F2: " + from.to_string() + " maps to " +
                                to.to_string() + ", which has several non-singleton blocks");
    }
    out.add(from, to);
  }
  return out;
}

struct BijectionResult {
  std::vector<std::vector<int>> bijections;  // one entry unless not unique
  bool unique = true;
  Certificate certificate;

  const std::vector<int>& phi() const { return bijections.front(); }
};

namespace detail {

inline std::string perm_string(const std::vector<int>& phi) {
  std::string s = "[";
  for (std::size_t i = 0; i < phi.size(); ++i) s += (i ? " " : "") + std::to_string(phi[i]);
  return s + "]";
}

/// One check per entry: t(p) = phi_*(p).
inline void certify_entries(const LatticeIsoTable& t, const std::vector<int>& phi,
                            Certificate& cert) {
  for (const auto& [from, to] : t.entries()) {
    const bool ok = push_forward(from, phi) == to;
    cert.add("F(" + from.to_string() + ") = phi_*(" + from.to_string() + ")", ok, ok ? 0.0 : 1.0,
             "expected " + push_forward(from, phi).to_string() + ", table has " + to.to_string());
  }
}

}  // namespace detail

/// Point bijection phi with t(pi_K) = pi_{phi[K]}, read off from the
/// images of the co-singleton blocks X \ {x}. For n = 2 both bijections are
/// returned and flagged non-unique.
inline BijectionResult reconstruct_bijection_finite(const LatticeIsoTable& t) {
  const int n = t.n_domain();
  if (n != t.n_codomain()) {
    throw DimensionMismatch("reconstruct_bijection_finite: ground sizes " + std::to_string(n) +
                            " and " + std::to_string(t.n_codomain()) + " differ");
  }
  if (n < 1) throw PreconditionError("reconstruct_bijection_finite: empty table");
  t.validate();

  BijectionResult r;
  if (n <= 2) {
    r.bijections.push_back(n == 1 ? std::vector<int>{0} : std::vector<int>{0, 1});
    if (n == 2) r.bijections.push_back({1, 0});
    r.unique = n == 1;
    for (const auto& phi : r.bijections) {
      Certificate c;
      detail::certify_entries(t, phi, c);
      r.certificate.append(c, "phi = " + detail::perm_string(phi) + ": ");
    }
    return r;
  }

  std::vector<int> phi(n, -1);
  std::vector<bool> hit(n, false);
  for (int x = 0; x < n; ++x) {
    std::vector<int> rest;
    for (int y = 0; y < n; ++y)
      if (y != x) rest.push_back(y);
    const Partition pk = single_block_partition(n, rest);
    const auto image = t.find(pk);
    if (!image) {
      throw ReconstructionFailure("reconstruct_bijection_finite: table lacks the entry for " +
                                  pk.to_string());
    }
    const auto blocks = image->blocks();
    if (blocks.size() != 2) {
      throw ReconstructionFailure("reconstruct_bijection_finite: F(" + pk.to_string() + ") = " +
                                  image->to_string() + " is not a co-singleton partition");
    }
    const auto& lone = blocks[0].size() == 1 ? blocks[0] : blocks[1];
    if (lone.size() != 1 || hit[lone[0]]) {
      throw ReconstructionFailure("reconstruct_bijection_finite: F(" + pk.to_string() + ") = " +
                                  image->to_string() + " does not single out a new point");
    }
    phi[x] = lone[0];
    hit[lone[0]] = true;
    r.certificate.add("F(" + pk.to_string() + ") = " + image->to_string() + " gives phi(" +
                          std::to_string(x) + ") = " + std::to_string(lone[0]),
                      true);
  }
  detail::certify_entries(t, phi, r.certificate);
  if (const auto* bad = r.certificate.first_failure()) {
    throw ReconstructionFailure("reconstruct_bijection_finite: identity " + bad->name +
                                " fails (" + bad->detail + ")");
  }
  r.bijections.push_back(std::move(phi));
  return r;
}

/// The isomorphism f -> f o phi^{-1} of C^n, as the permutation matrix P with
/// P e_x = e_{phi(x)}.
struct StarIso {
  std::vector<int> phi;
  Matrix permutation;
  Certificate certificate;
};

inline Matrix permutation_matrix(const std::vector<int>& phi) {
  const int n = static_cast<int>(phi.size());
  Matrix p = zeros(n);
  for (int x = 0; x < n; ++x) p(phi[x], x) = 1.0;
  return p;
}

inline StarIso reconstruct_star_iso_commutative(const LatticeIsoTable& t) {
  auto b = reconstruct_bijection_finite(t);
  if (!b.unique) {
    throw ExceptionalAlgebra(
        "reconstruct_star_iso_commutative: for C^2 the order data fit two *-isomorphisms",
        "phi = [0 1] (identity); phi = [1 0] (swap)");
  }
  StarIso s;
  s.phi = b.phi();
  s.permutation = permutation_matrix(s.phi);
  s.certificate = std::move(b.certificate);

  // Run the induced action on subalgebras of C^n back through the bridge.
  // Canonical order need not list the diagonal projections by coordinate.
  const int n = t.n_domain();
  const AlgebraShape cn(std::vector<int>(n, 1));
  const Resolution d = Resolution::diagonal(cn);
  std::vector<int> coord(n);
  for (int j = 0; j < n; ++j) {
    for (int x = 0; x < n; ++x)
      if (d[j].block(x)(0, 0).real() > 0.5) coord[j] = x;
  }
  for (const auto& [from, to] : t.entries()) {
    std::vector<int> labels(n);
    for (int j = 0; j < n; ++j) labels[j] = from[coord[j]];
    const Resolution c =
        partition_to_subalgebra(d, Partition::from_labels(std::span<const int>(labels)));
    std::vector<AlgebraElement> moved;
    for (const auto& p : c.projections()) {
      moved.push_back(AlgebraElement::from_full(
          cn, s.permutation * p.to_full() * s.permutation.transpose()));
    }
    const Partition back_d = down_set_to_partition(d, Resolution::make(cn, std::move(moved)));
    for (int j = 0; j < n; ++j) labels[coord[j]] = back_d[j];
    const Partition back = Partition::from_labels(std::span<const int>(labels));
    s.certificate.add("induced action on C(C^n) reproduces F(" + from.to_string() + ")",
                      back == to, back == to ? 0.0 : 1.0);
  }
  if (const auto* bad = s.certificate.first_failure()) {
    throw ReconstructionFailure("reconstruct_star_iso_commutative: " + bad->name + " fails");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Bohr oracles

/// Finitely many responses of an order isomorphism C(A) -> C(B).
class BohrOracle {
 public:
  BohrOracle() = default;
  BohrOracle(AlgebraShape domain, AlgebraShape codomain, double tol = 1e-9)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), tol_(tol) {}

  /// Repeated inputs must repeat their response.
  void add(Resolution from, Resolution to) {
    if (!(from.shape() == domain_) || !(to.shape() == codomain_)) {
      throw DimensionMismatch("BohrOracle: entry shape differs from the oracle's shapes");
    }
    if (const auto known = find(from)) {
      if (!same_point(*known, to, tol_)) {
        throw InconsistentOracle("BohrOracle: two different responses for one subalgebra");
      }
      return;
    }
    entries_.emplace_back(std::move(from), std::move(to));
  }

  void add_probe(Resolution d) { probes_.push_back(std::move(d)); }

  std::optional<Resolution> find(const Resolution& c) const {
    for (const auto& [from, to] : entries_) {
      if (same_point(from, c, tol_)) return to;
    }
    return std::nullopt;
  }

  Resolution lookup(const Resolution& c) const {
    auto r = find(c);
    if (!r) {
      throw InconsistentOracle("BohrOracle: no response for a subalgebra with " +
                               std::to_string(c.size()) + " minimal projections");
    }
    return *r;
  }

  const AlgebraShape& domain_shape() const { return domain_; }
  const AlgebraShape& codomain_shape() const { return codomain_; }
  const std::vector<std::pair<Resolution, Resolution>>& entries() const { return entries_; }
  const std::vector<Resolution>& probes() const { return probes_; }
  double tolerance() const { return tol_; }

  /// bottom -> bottom when present, and c <= d iff B(c) <= B(d) on all pairs.
  void validate(const Tolerance& tol = {}) const {
    const Resolution bot = Resolution::bottom(domain_);
    if (const auto b = find(bot); b && b->size() != 1) {
      throw NotOrderIsomorphism("BohrOracle: bottom is not sent to bottom");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      for (std::size_t j = 0; j < entries_.size(); ++j) {
        if (i == j) continue;
        const bool dom = subalgebra_leq(entries_[i].first, entries_[j].first, tol);
        const bool cod = subalgebra_leq(entries_[i].second, entries_[j].second, tol);
        if (dom != cod) {
          throw NotOrderIsomorphism("BohrOracle: entries " + std::to_string(i) + " and " +
                                    std::to_string(j) + " violate order preservation");
        }
      }
    }
  }

 private:
  AlgebraShape domain_, codomain_;
  double tol_ = 1e-9;
  std::vector<std::pair<Resolution, Resolution>> entries_;
  std::vector<Resolution> probes_;
};

/// For probes D, E meeting in C*(e) with both corners of dimension > 1:
/// C*(e, a', b') with a' the first D-projection strictly under e and b' the
/// first E-projection strictly under 1 - e.
inline Resolution case_three_witness(const Resolution& d, const Resolution& e_alg,
                                     const AlgebraElement& e, const Tolerance& tol = {}) {
  const AlgebraElement eperp = ortho(e);
  auto first_strictly_below = [&](const Resolution& r, const AlgebraElement& p)
      -> std::optional<AlgebraElement> {
    for (const auto& q : r.projections()) {
      if (proj_leq(q, p, tol) && !approx_equal(q, p, tol.eq_tol)) return q;
    }
    return std::nullopt;
  };
  const auto a = first_strictly_below(d, e);
  const auto b = first_strictly_below(e_alg, eperp);
  if (!a || !b) {
    throw PreconditionError("case_three_witness: no projection strictly below e or 1 - e");
  }
  return Resolution::make(d.shape(), {*a, e - *a, *b, eperp - *b}, tol);
}

namespace detail {

template <typename F>
Resolution image_resolution(F&& action, const Resolution& c, const AlgebraShape& codomain,
                            const Tolerance& tol) {
  std::vector<AlgebraElement> ps;
  for (const auto& p : c.projections()) ps.push_back(action(p));
  Tolerance loose = tol;
  loose.eq_tol = std::max(tol.eq_tol, 1e-8);
  (void)codomain;
  return Resolution::make(codomain, std::move(ps), loose);
}

}  // namespace detail

/// Oracle for the Bohr map induced by a projection action: responses on
/// every down-set of a probe, plus the down-set of every case-three
/// witness between probe pairs.
template <typename F>
BohrOracle bohr_oracle_from_action(F&& action, const AlgebraShape& domain,
                                   const AlgebraShape& codomain,
                                   const std::vector<Resolution>& probes,
                                   const Tolerance& tol = {}) {
  BohrOracle o(domain, codomain, std::max(tol.eq_tol, 1e-8));
  auto add_down_set = [&](const Resolution& d) {
    for (const auto& c : down_set(d, tol)) {
      o.add(c, detail::image_resolution(action, c, codomain, tol));
    }
  };
  for (const auto& d : probes) {
    o.add_probe(d);
    add_down_set(d);
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (std::size_t j = i + 1; j < probes.size(); ++j) {
      const Resolution c = meet_subalgebras(probes[i], probes[j], tol);
      if (c.size() != 2) continue;
      if (corner_dim(c[0], tol) > 1 && corner_dim(c[1], tol) > 1) {
        add_down_set(case_three_witness(probes[i], probes[j], c[0], tol));
      }
    }
  }
  return o;
}

inline BohrOracle bohr_oracle_from_generator(const Generator& g, const AlgebraShape& shape,
                                             const std::vector<Resolution>& probes,
                                             const Tolerance& tol = {}) {
  return bohr_oracle_from_action([&](const AlgebraElement& p) { return g.act(p, shape); },
                                 shape, shape, probes, tol);
}

/// Probes for shape: the diagonal, for a single block n >= 3 two
/// corner-rotated copies of it (one meeting the diagonal in C*(E_00), one in
/// C*(E_00 + E_11)), then n - 1 random conjugates (max block size for
/// direct sums), enough to span the self-adjoint part.
inline std::vector<Resolution> standard_probes(const AlgebraShape& shape, Rng& rng,
                                               const Tolerance& tol = {}) {
  const Resolution d0 = Resolution::diagonal(shape);
  std::vector<Resolution> probes{d0};
  int extra = 0;
  if (shape.is_single_block()) {
    const int n = shape.blocks[0];
    extra = std::max(n - 1, 2);
    if (n >= 3) {
      for (int split : {1, 2}) {
        Matrix v = zeros(n);
        v.topLeftCorner(split, split) = random_unitary(split, rng);
        v.bottomRightCorner(n - split, n - split) = random_unitary(n - split, rng);
        probes.push_back(d0.conjugated(AlgebraElement(shape, {v}), tol));
      }
    }
  } else {
    for (int b : shape.blocks) extra = std::max(extra, b);
    extra = std::max(extra, 1);
  }
  for (int i = 0; i < extra; ++i) probes.push_back(d0.conjugated(random_unitary(shape, rng), tol));
  return probes;
}

// ---------------------------------------------------------------------------
// Weak Jordan maps

/// J_D on one probe: J(d_j) = image[perm[j]].
struct ProbeIso {
  Resolution domain;
  Resolution image;
  std::vector<int> perm;
};

/// Per-probe commutative isomorphisms, evaluated on elements of the
/// probes' spans.
class WeakJordanMap {
 public:
  WeakJordanMap() = default;
  WeakJordanMap(AlgebraShape domain, AlgebraShape codomain)
      : domain_(std::move(domain)), codomain_(std::move(codomain)) {}

  void add_probe(ProbeIso p) { probes_.push_back(std::move(p)); }

  const AlgebraShape& domain_shape() const { return domain_; }
  const AlgebraShape& codomain_shape() const { return codomain_; }
  const std::vector<ProbeIso>& probes() const { return probes_; }
  Certificate& certificate() { return certificate_; }
  const Certificate& certificate() const { return certificate_; }

  /// J_D(a) for a in span(D).
  std::optional<AlgebraElement> apply_on(int probe, const AlgebraElement& a,
                                         const Tolerance& tol = {}) const {
    const auto& pi = probes_.at(probe);
    AlgebraElement rebuilt = AlgebraElement::zero(domain_);
    AlgebraElement out = AlgebraElement::zero(codomain_);
    for (int j = 0; j < pi.domain.size(); ++j) {
      const Complex alpha = (pi.domain[j] * a).trace() / pi.domain[j].trace();
      rebuilt = rebuilt + alpha * pi.domain[j];
      out = out + alpha * pi.image[pi.perm[j]];
    }
    if (!approx_equal(rebuilt, a, tol.eq_tol)) return std::nullopt;
    return out;
  }

  /// J(a) through the first probe whose span contains a.
  AlgebraElement apply(const AlgebraElement& a, const Tolerance& tol = {}) const {
    for (int i = 0; i < static_cast<int>(probes_.size()); ++i) {
      if (auto r = apply_on(i, a, tol)) return *r;
    }
    throw UndefinedInput("WeakJordanMap: element lies in no probed subalgebra");
  }

  Resolution image(const Resolution& c, const Tolerance& tol = {}) const {
    std::vector<AlgebraElement> ps;
    for (const auto& p : c.projections()) ps.push_back(apply(p, tol));
    return Resolution::make(codomain_, std::move(ps), tol);
  }

  /// The induced Bohr action on every probe's down-set.
  std::vector<std::pair<Resolution, Resolution>> probe_table(const Tolerance& tol = {}) const {
    std::vector<std::pair<Resolution, Resolution>> out;
    for (int i = 0; i < static_cast<int>(probes_.size()); ++i) {
      for (const auto& c : down_set(probes_[i].domain, tol)) {
        std::vector<AlgebraElement> ps;
        for (const auto& p : c.projections()) ps.push_back(*apply_on(i, p, tol));
        out.emplace_back(c, Resolution::make(codomain_, std::move(ps), tol));
      }
    }
    return out;
  }

 private:
  AlgebraShape domain_, codomain_;
  std::vector<ProbeIso> probes_;
  Certificate certificate_;
};

/// Same probe tables, entry by entry.
inline bool same_bohr_action(const WeakJordanMap& a, const WeakJordanMap& b,
                             const Tolerance& tol = {}) {
  const auto ta = a.probe_table(tol), tb = b.probe_table(tol);
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (!same_subalgebra(ta[i].first, tb[i].first, tol) ||
        !same_subalgebra(ta[i].second, tb[i].second, tol)) {
      return false;
    }
  }
  return true;
}

inline bool is_exceptional_shape(const AlgebraShape& shape) {
  return shape == AlgebraShape(std::vector<int>{2}) || shape == AlgebraShape(std::vector<int>{1, 1});
}

/// For C^2 or M_2: the identity and the map swapping the two diagonal
/// projections on the diagonal probe (identity on every other probe).
inline std::pair<WeakJordanMap, WeakJordanMap> exceptional_witness_pair(
    const AlgebraShape& shape, std::vector<Resolution> probes, const Tolerance& tol = {}) {
  if (!is_exceptional_shape(shape)) {
    throw PreconditionError("exceptional_witness_pair: shape must be (2) or (1,1)");
  }
  const Resolution diag = Resolution::diagonal(shape);
  bool has_diag = false;
  for (const auto& d : probes) has_diag = has_diag || same_subalgebra(d, diag, tol);
  if (!has_diag) probes.insert(probes.begin(), diag);
  WeakJordanMap id(shape, shape), swap(shape, shape);
  for (const auto& d : probes) {
    if (!is_maximal_abelian(d)) {
      throw PreconditionError("exceptional_witness_pair: probes must be maximal abelian");
    }
    id.add_probe({d, d, {0, 1}});
    const bool is_diag = same_subalgebra(d, diag, tol);
    swap.add_probe({d, d, is_diag ? std::vector<int>{1, 0} : std::vector<int>{0, 1}});
  }
  return {std::move(id), std::move(swap)};
}

namespace detail {

/// J_C for a subalgebra c with at least three minimal projections, read
/// from the oracle's responses on the down-set of c.
inline ProbeIso commutative_iso(const BohrOracle& o, const Resolution& c, const Tolerance& tol,
                                Certificate* cert = nullptr) {
  const int k = c.size();
  const Resolution ci = o.lookup(c);
  if (ci.size() != k) {
    throw InconsistentOracle("glue_weak_jordan: response to a subalgebra has a different "
                             "number of minimal projections");
  }
  if (k == 1) return {c, ci, {0}};
  LatticeIsoTable t(k, k);
  for (const auto& p : enumerate_partitions(k)) {
    const Resolution s = partition_to_subalgebra(c, p, tol);
    const Resolution si = o.lookup(s);
    Partition q;
    try {
      q = partition_relative_to(ci, si, tol);
    } catch (const PreconditionError&) {
      throw InconsistentOracle("glue_weak_jordan: response to a subalgebra below C is not below "
                               "the response to C");
    }
    t.add(p, q);
  }
  auto star = reconstruct_star_iso_commutative(t);
  if (cert) cert->append(star.certificate);
  return {c, ci, star.phi};
}

inline AlgebraElement apply_iso(const ProbeIso& p, const AlgebraElement& e, const Tolerance& tol) {
  AlgebraElement out = AlgebraElement::zero(p.image.shape());
  for (int j : parts_below(e, p.domain, tol.eq_tol)) out = out + p.image[p.perm[j]];
  return out;
}

inline double deviation(const AlgebraElement& a, const AlgebraElement& b) {
  return (a - b).norm();
}

}  // namespace detail

/// Per-probe commutative reconstructions, glued after checking agreement on
/// every pairwise intersection. Throws ExceptionalAlgebra for C^2 and M_2,
/// InconsistentOracle when the pieces disagree or responses are missing.
inline WeakJordanMap glue_weak_jordan(const BohrOracle& o, const std::vector<Resolution>& probes,
                                      const Tolerance& tol = {}) {
  if (probes.empty()) throw PreconditionError("glue_weak_jordan: no probes");
  const AlgebraShape& shape = o.domain_shape();
  for (const auto& d : probes) {
    if (!(d.shape() == shape) || !is_maximal_abelian(d)) {
      throw PreconditionError("glue_weak_jordan: every probe must be maximal abelian in A");
    }
  }

  if (is_exceptional_shape(shape)) {
    std::ostringstream cand;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const Resolution img = o.lookup(probes[i]);
      if (img.size() != 2) throw InconsistentOracle("glue_weak_jordan: probe response is not maximal");
      cand << "probe " << i << ": J(d0) = r0, J(d1) = r1  or  J(d0) = r1, J(d1) = r0\n";
    }
    throw ExceptionalAlgebra(std::string("glue_weak_jordan: A = ") +
                                 (shape.is_single_block() ? "M_2(C)" : "C^2") +
                                 "; order data fit more than one weak Jordan map",
                             cand.str());
  }

  WeakJordanMap w(shape, o.codomain_shape());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    Certificate c;
    w.add_probe(detail::commutative_iso(o, probes[i], tol, &c));
    w.certificate().append(c, "probe " + std::to_string(i) + ": ");
  }

  auto require = [&](const std::string& name, const AlgebraElement& x, const AlgebraElement& y) {
    const double dev = detail::deviation(x, y);
    const bool ok = dev <= tol.eq_tol * 10 + 1e-12;
    w.certificate().add(name, ok, dev);
    if (!ok) throw InconsistentOracle("glue_weak_jordan: " + name + " fails (deviation " +
                                      std::to_string(dev) + ")");
  };

  const AlgebraShape& cod = o.codomain_shape();
  for (std::size_t a = 0; a < probes.size(); ++a) {
    for (std::size_t b = a + 1; b < probes.size(); ++b) {
      const std::string tag = "probes " + std::to_string(a) + "," + std::to_string(b) + ": ";
      const Resolution c = meet_subalgebras(probes[a], probes[b], tol);
      const auto& pa = w.probes()[a];
      const auto& pb = w.probes()[b];
      if (c.size() == 1) {
        w.certificate().add(tag + "meet is C1, sent to the bottom", true);
        continue;
      }
      if (c.size() >= 3) {
        const ProbeIso pc = detail::commutative_iso(o, c, tol);
        for (int j = 0; j < c.size(); ++j) {
          const auto jc = detail::apply_iso(pc, c[j], tol);
          require(tag + "J_D = J_C on meet projection " + std::to_string(j),
                  detail::apply_iso(pa, c[j], tol), jc);
          require(tag + "J_E = J_C on meet projection " + std::to_string(j),
                  detail::apply_iso(pb, c[j], tol), jc);
        }
        continue;
      }
      const AlgebraElement& e = c[0];
      const AlgebraElement jd = detail::apply_iso(pa, e, tol);
      const AlgebraElement je = detail::apply_iso(pb, e, tol);
      const int ce = corner_dim(e, tol), cp = corner_dim(c[1], tol);
      if (ce == 1 && cp == 1) {
        throw ExceptionalAlgebra("glue_weak_jordan: both corners of e are one-dimensional",
                                 "J(e) = e~  or  J(e) = 1 - e~");
      }
      if (ce == 1 || cp == 1) {
        const Resolution ci = o.lookup(c);
        if (ci.size() != 2) throw InconsistentOracle("glue_weak_jordan: atom not sent to an atom");
        const bool first_small = corner_dim(ci[0], tol) == 1;
        if (first_small == (corner_dim(ci[1], tol) == 1)) {
          throw InconsistentOracle("glue_weak_jordan: corner dimensions of B(C*(e)) do not "
                                   "match those of C*(e)");
        }
        const AlgebraElement small = first_small ? ci[0] : ci[1];
        const AlgebraElement forced = ce == 1 ? small : AlgebraElement::unit(cod) - small;
        require(tag + "J_D(e) = corner-forced image", jd, forced);
        require(tag + "J_E(e) = corner-forced image", je, forced);
      } else {
        const Resolution c3 = case_three_witness(probes[a], probes[b], e, tol);
        const ProbeIso p3 = detail::commutative_iso(o, c3, tol);
        const AlgebraElement j3 = detail::apply_iso(p3, e, tol);
        require(tag + "J_D(e) = J_C3(e)", jd, j3);
        require(tag + "J_E(e) = J_C3(e)", je, j3);
      }
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Jordan maps and (anti)unitaries

/// The real-linear map on M_n(C)_sa agreeing with w on every probe, fitted by
/// least squares. Needs probes whose projections span the n^2-dimensional
/// self-adjoint part (n + 1 generic maximal abelian subalgebras suffice).
inline LinearMapTable linear_extension(const WeakJordanMap& w, const Tolerance& tol = {},
                                       Certificate* cert = nullptr) {
  if (!w.domain_shape().is_single_block() || !(w.domain_shape() == w.codomain_shape())) {
    throw PreconditionError("linear_extension: needs A = B = M_n(C)");
  }
  const int n = w.domain_shape().blocks[0];
  const int dim = n * n;
  std::vector<std::pair<Matrix, Matrix>> samples;
  for (const auto& p : w.probes()) {
    for (int j = 0; j < p.domain.size(); ++j) {
      samples.emplace_back(p.domain[j].block(0), p.image[p.perm[j]].block(0));
    }
  }
  Eigen::MatrixXd x(samples.size(), dim), y(samples.size(), dim);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    x.row(r) = hermitian_coords(samples[r].first).transpose();
    y.row(r) = hermitian_coords(samples[r].second).transpose();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < dim) {
    throw PreconditionError("linear_extension: probes span only " + std::to_string(qr.rank()) +
                            " of " + std::to_string(dim) + " self-adjoint dimensions");
  }
  const Eigen::MatrixXd m = qr.solve(y);
  const double residual = (x * m - y).cwiseAbs().maxCoeff();
  if (cert) cert->add("linear extension reproduces every probed value", residual <= tol.eq_tol,
                      residual);
  const auto basis = hermitian_basis(n);
  std::vector<Matrix> images;
  for (int i = 0; i < dim; ++i) {
    Matrix img = zeros(n);
    for (int k = 0; k < dim; ++k) img += m(i, k) * basis[k];
    images.push_back(std::move(img));
  }
  return {n, std::move(images)};
}

struct JordanImplementation {
  Generator generator;  // phase fixed: first nonzero entry (column-major) real positive
  Certificate certificate;
};

/// u with J(a) = u a u* (or u conj(a) u*), built from the images of the
/// matrix units.
inline JordanImplementation implement_jordan(const LinearMapTable& j, const Tolerance& tol = {}) {
  const int n = j.dim();
  if (n < 1) throw PreconditionError("implement_jordan: empty map");
  std::vector<std::vector<Matrix>> k(n, std::vector<Matrix>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) k[a][b] = complexify(j, matrix_unit(n, a, b));

  // E_ab E_cd = delta_bc E_ad.
  double mult = 0.0, anti = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const Matrix want = b == c ? k[a][d] : zeros(n);
          mult = std::max(mult, (k[a][b] * k[c][d] - want).cwiseAbs().maxCoeff());
          anti = std::max(anti, (k[c][d] * k[a][b] - want).cwiseAbs().maxCoeff());
        }

  JordanImplementation r;
  const double limit = tol.eq_tol;
  const bool is_anti = mult > limit;
  if (is_anti && anti > limit) {
    throw NotJordan("implement_jordan: neither multiplicative (deviation " + std::to_string(mult) +
                    ") nor anti-multiplicative (deviation " + std::to_string(anti) + ")");
  }
  r.certificate.add(is_anti ? "J is anti-multiplicative on matrix units"
                            : "J is multiplicative on matrix units",
                    true, is_anti ? anti : mult);

  // With J' = J o transpose in the anti case, J'(E_ab) = u E_ab u*.
  auto unit_image = [&](int a, int b) -> const Matrix& { return is_anti ? k[b][a] : k[a][b]; };
  const Matrix& p = unit_image(0, 0);
  Eigen::Index col = 0;
  p.colwise().norm().maxCoeff(&col);
  const Vector xi = p.col(col).normalized();
  Matrix u(n, n);
  for (int a = 0; a < n; ++a) u.col(a) = unit_image(a, 0) * xi;

  const Complex* data = u.data();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(data[i]) > 1e-6) {
      u *= std::conj(data[i]) / std::abs(data[i]);
      break;
    }
  }
  r.generator = {u, is_anti};

  const double unitarity = (u.adjoint() * u - identity(n)).cwiseAbs().maxCoeff();
  r.certificate.add("u is unitary", unitarity <= 10 * limit, unitarity);
  double fit = 0.0;
  const auto basis = hermitian_basis(n);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    fit = std::max(fit, (j.images()[i] - r.generator.act(basis[i])).cwiseAbs().maxCoeff());
  }
  r.certificate.add(is_anti ? "J(a) = u conj(a) u* on the self-adjoint basis"
                            : "J(a) = u a u* on the self-adjoint basis",
                    fit <= 10 * limit, fit);
  if (const auto* bad = r.certificate.first_failure()) {
    throw ReconstructionFailure("implement_jordan: " + bad->name + " fails");
  }
  return r;
}

inline JordanImplementation implement_jordan(const WeakJordanMap& w, const Tolerance& tol = {}) {
  Certificate c = w.certificate();
  const LinearMapTable table = linear_extension(w, tol, &c);
  if (const auto* bad = c.first_failure()) {
    throw ReconstructionFailure("implement_jordan: " + bad->name + " fails");
  }
  auto r = implement_jordan(table, tol);
  c.append(r.certificate);
  r.certificate = std::move(c);
  return r;
}

struct BlockImplementation {
  int source = 0;
  int target = 0;
  Generator generator;
};

struct DirectSumImplementation {
  std::vector<BlockImplementation> blocks;
  Certificate certificate;
};

/// Jordan automorphism of a direct sum: central projections are matched by
/// their images (block sizes must agree), then each block is implemented
/// separately.
template <typename J>
DirectSumImplementation implement_jordan_direct_sum(const AlgebraShape& shape, J&& jordan,
                                                    const Tolerance& tol = {}) {
  DirectSumImplementation r;
  std::vector<bool> used(shape.block_count(), false);
  for (int i = 0; i < shape.block_count(); ++i) {
    std::vector<Matrix> zb;
    for (int b = 0; b < shape.block_count(); ++b) {
      zb.push_back(b == i ? identity(shape.blocks[b]) : zeros(shape.blocks[b]));
    }
    const AlgebraElement zi = jordan(AlgebraElement(shape, zb));
    int target = -1;
    for (int t = 0; t < shape.block_count() && target < 0; ++t) {
      if (used[t] || shape.blocks[t] != shape.blocks[i]) continue;
      std::vector<Matrix> tb;
      for (int b = 0; b < shape.block_count(); ++b) {
        tb.push_back(b == t ? identity(shape.blocks[b]) : zeros(shape.blocks[b]));
      }
      if (approx_equal(zi, AlgebraElement(shape, tb), tol.eq_tol)) target = t;
    }
    if (target < 0) {
      throw NotJordan("implement_jordan_direct_sum: central projection of block " +
                      std::to_string(i) + " is not sent to a central projection of equal size");
    }
    used[target] = true;
    r.certificate.add("block " + std::to_string(i) + " -> block " + std::to_string(target), true);
    const int n = shape.blocks[i];
    const auto table = LinearMapTable::from_function(n, [&](const Matrix& a) {
      std::vector<Matrix> ab;
      for (int b = 0; b < shape.block_count(); ++b) ab.push_back(b == i ? a : zeros(shape.blocks[b]));
      return Matrix(jordan(AlgebraElement(shape, ab)).block(target));
    });
    auto impl = implement_jordan(table, tol);
    r.certificate.append(impl.certificate, "block " + std::to_string(i) + ": ");
    r.blocks.push_back({i, target, impl.generator});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Projection maps from Bohr data

using AlgebraProjectionMap = MapTable<AlgebraElement>;

struct OrthoIsoResult {
  AlgebraProjectionMap map;
  Certificate certificate;
};

namespace detail {

inline AlgebraElement ortho_image(const BohrOracle& o, const AlgebraElement& e,
                                  const Tolerance& tol) {
  const AlgebraShape& cod = o.codomain_shape();
  if (is_zero(e, tol.eq_tol)) return AlgebraElement::zero(cod);
  if (approx_equal(e, AlgebraElement::unit(o.domain_shape()), tol.eq_tol)) {
    return AlgebraElement::unit(cod);
  }
  const AlgebraElement eperp = ortho(e);
  const Resolution c = Resolution::make(o.domain_shape(), {e, eperp}, tol);
  const Resolution ci = o.lookup(c);
  if (ci.size() != 2) throw InconsistentOracle("orthoiso_from_bohr: atom not sent to an atom");
  const int ce = corner_dim(e, tol), cp = corner_dim(eperp, tol);
  if (ce == 1 && cp == 1) {
    throw ExceptionalAlgebra("orthoiso_from_bohr: both corners of e are one-dimensional (C^2 or M_2)",
                             "phi(e) = " + std::string("first or second projection of B(C*(e))"));
  }
  if (ce == 1 || cp == 1) {
    const bool first_small = corner_dim(ci[0], tol) == 1;
    if (first_small == (corner_dim(ci[1], tol) == 1)) {
      throw InconsistentOracle("orthoiso_from_bohr: corner dimensions of B(C*(e)) do not match");
    }
    const AlgebraElement small = first_small ? ci[0] : ci[1];
    return ce == 1 ? small : ortho(small);
  }
  // Both corners large: read e off a larger commutative subalgebra whose
  // down-set the oracle answers.
  std::vector<const Resolution*> candidates;
  for (const auto& d : o.probes()) candidates.push_back(&d);
  for (const auto& [from, to] : o.entries()) candidates.push_back(&from);
  for (const Resolution* w : candidates) {
    if (w->size() < 3 || !in_span(e, *w, tol)) continue;
    try {
      const ProbeIso pw = commutative_iso(o, *w, tol);
      return apply_iso(pw, e, tol);
    } catch (const InconsistentOracle&) {
      continue;
    }
  }
  throw InconsistentOracle("orthoiso_from_bohr: no answered subalgebra of dimension >= 3 "
                           "contains the probed projection");
}

}  // namespace detail

/// phi(e) for each probed projection, with phi(1 - e) = 1 - phi(e) and
/// monotonicity checked on the probes.
inline OrthoIsoResult orthoiso_from_bohr(const BohrOracle& o,
                                         const std::vector<AlgebraElement>& atom_probes,
                                         const Tolerance& tol = {}) {
  if (is_exceptional_shape(o.domain_shape())) {
    throw ExceptionalAlgebra("orthoiso_from_bohr: A is C^2 or M_2; order data fit more than "
                             "one projection map",
                             "phi(e) and phi(1 - e) can be exchanged");
  }
  OrthoIsoResult r{AlgebraProjectionMap(std::max(tol.eq_tol, 1e-8)), {}};
  std::vector<std::pair<AlgebraElement, AlgebraElement>> found;
  for (std::size_t i = 0; i < atom_probes.size(); ++i) {
    const auto& e = atom_probes[i];
    if (!(e.shape() == o.domain_shape()) || !is_projection(e, tol)) {
      throw PreconditionError("orthoiso_from_bohr: probe is not a projection of A");
    }
    const AlgebraElement fe = detail::ortho_image(o, e, tol);
    const AlgebraElement fp = detail::ortho_image(o, ortho(e), tol);
    const double dev = detail::deviation(fp, ortho(fe));
    r.certificate.add("phi(1 - e) = 1 - phi(e) for probe " + std::to_string(i),
                      dev <= 10 * tol.eq_tol, dev);
    found.emplace_back(e, fe);
    if (!r.map.find(e)) r.map.add(e, fe);
  }
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (i == j || !proj_leq(found[i].first, found[j].first, tol)) continue;
      r.certificate.add("monotone on probes " + std::to_string(i) + " <= " + std::to_string(j),
                        proj_leq(found[i].second, found[j].second, tol));
    }
  }
  return r;
}

}  // namespace bohrlat
