#pragma once

// Property suites behind `bohrlat verify`. Every section reports how many
// cases it ran and the largest deviation seen; exceptions become failed
// sections rather than escaping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "bohrlat/io.hpp"

namespace bohrlat {

struct SuiteSection {
  std::string suite;
  std::string name;
  bool pass = false;
  long count = 0;
  double max_deviation = 0.0;
  std::string error;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<SuiteSection> sections;

  bool pass() const {
    return std::all_of(sections.begin(), sections.end(), [](const auto& s) { return s.pass; });
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"partitions", "symmetry", "omp", "reconstruct"};
  return names;
}

namespace suites {

struct Tally {
  long count = 0;
  double max_dev = 0.0;
  bool pass = true;

  void record(double dev, bool ok) {
    ++count;
    max_dev = std::max(max_dev, dev);
    pass = pass && ok;
  }
};

inline void run_section(SuiteReport& report, const std::string& suite, const std::string& name,
                        const std::function<Tally()>& body) {
  SuiteSection s{suite, name};
  try {
    const Tally t = body();
    s.pass = t.pass;
    s.count = t.count;
    s.max_deviation = t.max_dev;
  } catch (const std::exception& e) {
    s.pass = false;
    s.error = e.what();
  }
  report.sections.push_back(std::move(s));
}

/// Canonical labelings among all n^n maps {0..n-1} -> {0..n-1}.
inline long brute_force_partition_count(int n) {
  std::vector<int> f(n, 0);
  long count = 0;
  while (true) {
    int max_seen = -1;
    bool canonical = true;
    for (int i = 0; i < n && canonical; ++i) {
      canonical = f[i] <= max_seen + 1;
      max_seen = std::max(max_seen, f[i]);
    }
    count += canonical ? 1 : 0;
    int i = n - 1;
    while (i >= 0 && ++f[i] == n) f[i--] = 0;
    if (i < 0) break;
  }
  return count;
}

inline void partitions_suite(SuiteReport& r, std::uint64_t, const Tolerance&) {
  run_section(r, "partitions", "bell_counts", [] {
    Tally t;
    for (int n = 1; n <= 8; ++n) {
      const long got = static_cast<long>(enumerate_partitions(n).size());
      const long want = n <= 6 ? brute_force_partition_count(n) : static_cast<long>(bell_number(n));
      t.record(std::abs(static_cast<double>(got - want)), got == want);
    }
    return t;
  });
  run_section(r, "partitions", "f2_characterization", [] {
    Tally t;
    for (int n = 1; n <= 6; ++n) {
      const PartitionLattice lattice(n);
      for (const auto& p : lattice.elements()) {
        const bool agree = is_F2_order_theoretic(p, lattice) == is_F2_direct(p);
        t.record(agree ? 0.0 : 1.0, agree);
      }
    }
    return t;
  });
  run_section(r, "partitions", "order_automorphisms", [] {
    Tally t;
    for (int n = 3; n <= 4; ++n) {
      const PartitionLattice lattice(n);
      const auto autos = lattice.order().automorphisms();
      long factorial = 1;
      for (int i = 2; i <= n; ++i) factorial *= i;
      t.record(std::abs(static_cast<double>(autos.size()) - factorial),
               static_cast<long>(autos.size()) == factorial);
      for (const auto& a : autos) {
        LatticeIsoTable table(n, n);
        for (int i = 0; i < lattice.size(); ++i) table.add(lattice[i], lattice[a[i]]);
        const auto b = reconstruct_bijection_finite(table);
        t.record(0.0, b.unique && b.certificate.all_pass());
      }
    }
    return t;
  });
}

inline void symmetry_suite(SuiteReport& r, std::uint64_t seed, const Tolerance& tol) {
  const double limit = 10 * tol.eq_tol;
  run_section(r, "symmetry", "trace_norm_identity", [&] {
    Tally t;
    Rng rng(seed ^ 0x11);
    for (int n = 2; n <= 6; ++n) {
      for (int i = 0; i < 200; ++i) {
        const Matrix e = random_rank_one_projection(n, rng);
        const Matrix f = random_rank_one_projection(n, rng);
        const double tp = transition_probability(e, f, tol);
        const double dev = std::abs(trace_norm(e - f) - 2.0 * std::sqrt(1.0 - tp));
        t.record(dev, dev <= limit);
      }
    }
    return t;
  });
  run_section(r, "symmetry", "kadison_degenerate_well_defined", [&] {
    Tally t;
    Rng rng(seed ^ 0x12);
    for (int i = 0; i < 50; ++i) {
      const int n = 3 + i % 3;
      std::vector<double> spec(n);
      spec[0] = spec[1] = 0.3;
      for (int k = 2; k < n; ++k) spec[k] = 0.4 / (n - 2);
      const auto rho = DensityMatrix::make(random_with_spectrum(spec, rng), tol);
      const Generator g{random_unitary(n, rng), i % 2 == 1};
      const auto w = wigner_of(g);
      const Matrix k1 = kadison_from_wigner(w, random_eigen_expansion(rho, rng, tol));
      const Matrix k2 = kadison_from_wigner(w, random_eigen_expansion(rho, rng, tol));
      const double dev = (k1 - k2).cwiseAbs().maxCoeff();
      t.record(dev, dev <= tol.eq_tol);
    }
    return t;
  });
  run_section(r, "symmetry", "kadison_jordan_duality", [&] {
    Tally t;
    Rng rng(seed ^ 0x13);
    for (int i = 0; i < 30; ++i) {
      const int n = 2 + i % 3;
      const Generator g{random_unitary(n, rng), i % 2 == 1};
      const auto k = jordan_from_generator(g);  // K(rho) = g(rho) has the same formula
      const auto j = jordan_from_kadison(k);
      // Adjoint of a -> u a u* is a -> u* a u; of a -> u conj(a) u* it is
      // a -> u^T conj(a) conj(u).
      const Generator adj{g.antiunitary ? Matrix(g.u.transpose()) : Matrix(g.u.adjoint()),
                          g.antiunitary};
      const auto expected = jordan_from_generator(adj);
      double dev = 0.0;
      for (std::size_t b = 0; b < j.images().size(); ++b) {
        dev = std::max(dev, (j.images()[b] - expected.images()[b]).cwiseAbs().maxCoeff());
      }
      Tolerance loose = tol;
      loose.eq_tol = limit;
      t.record(dev, dev <= limit && kadison_jordan_duality_check(k, j, loose) && is_jordan(j, loose));
    }
    return t;
  });
  run_section(r, "symmetry", "vonneumann_additivity", [&] {
    Tally t;
    Rng rng(seed ^ 0x14);
    for (int i = 0; i < 100; ++i) {
      const int n = 3 + i % 3;
      const Generator g{random_unitary(n, rng), false};
      const auto map = projection_map_of(g);
      const Matrix a = random_hermitian(n, rng), b = random_hermitian(n, rng);
      const Matrix lhs = vonneumann_extend(map, Matrix(a + b), tol);
      const Matrix rhs = vonneumann_extend(map, a, tol) + vonneumann_extend(map, b, tol);
      const double dev = (lhs - rhs).cwiseAbs().maxCoeff();
      t.record(dev, dev <= 10 * limit);
    }
    return t;
  });
  run_section(r, "symmetry", "wild_projection_map_not_additive", [&] {
    Tally t;
    const auto wild = qubit_twist_map(1.0);
    Matrix sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    const Matrix lhs = vonneumann_extend(wild, Matrix(sx + sz), tol);
    const Matrix rhs = vonneumann_extend(wild, sx, tol) + vonneumann_extend(wild, sz, tol);
    const double violation = (lhs - rhs).cwiseAbs().maxCoeff();
    t.record(violation, violation > 1e-3);
    return t;
  });
  run_section(r, "symmetry", "transition_probability_infimum", [&] {
    Tally t;
    Rng rng(seed ^ 0x15);
    for (int i = 0; i < 100; ++i) {
      const int n = 2 + i % 3;
      const Matrix e = random_rank_one_projection(n, rng);
      const Matrix f = random_rank_one_projection(n, rng);
      const double tp = (e * f).trace().real();
      const double est = tp_infimum_estimate(e, f, 20, seed + i, tol);
      const double dev = std::abs(est - tp);
      t.record(dev, dev <= tol.eq_tol);
    }
    return t;
  });
}

/// p <= q drawn from a random maximal abelian subalgebra of the shape.
inline std::pair<AlgebraElement, AlgebraElement> random_nested_pair(const AlgebraShape& shape,
                                                                    Rng& rng,
                                                                    const Tolerance& tol) {
  const Resolution d = Resolution::diagonal(shape).conjugated(random_unitary(shape, rng), tol);
  std::uniform_int_distribution<int> pick(0, 2);
  AlgebraElement p = AlgebraElement::zero(shape), q = AlgebraElement::zero(shape);
  for (const auto& x : d.projections()) {
    const int c = pick(rng);  // 0: in neither, 1: in q only, 2: in both
    if (c >= 1) q = q + x;
    if (c == 2) p = p + x;
  }
  return {p, q};
}

inline void omp_suite(SuiteReport& r, std::uint64_t seed, const Tolerance& tol) {
  run_section(r, "omp", "orthomodular_law", [&] {
    Tally t;
    Rng rng(seed ^ 0x21);
    for (const auto& blocks : std::vector<std::vector<int>>{{2}, {3}, {2, 1}, {2, 2}}) {
      const AlgebraShape shape(blocks);
      for (int i = 0; i < 250; ++i) {
        const auto [p, q] = random_nested_pair(shape, rng, tol);
        const AlgebraElement m = proj_meet(ortho(p), q);
        const double dev = (join_orthogonal(p, m, tol) - q).norm();
        t.record(dev, orthomodular_check(p, q, tol));
      }
    }
    return t;
  });
  run_section(r, "omp", "boolean_subalgebra_isomorphism", [&] {
    Tally t;
    for (int n = 1; n <= 5; ++n) {
      const AlgebraShape cn(std::vector<int>(n, 1));
      const auto family = down_set(Resolution::diagonal(cn), tol);
      const auto rep = boolean_poset_iso_check(cn, family, tol);
      const auto count = enumerate_diagonal_boolean_subalgebras(n).size();
      const bool counts = count == bell_number(n) && family.size() == bell_number(n);
      t.record(static_cast<double>(rep.violations.size()), rep.ok() && counts);
    }
    return t;
  });
}

inline void reconstruct_suite(SuiteReport& r, std::uint64_t seed, const Tolerance& tol) {
  run_section(r, "reconstruct", "bijection_recovery", [&] {
    Tally t;
    for (int n = 3; n <= 4; ++n) {
      std::vector<int> phi(n);
      std::iota(phi.begin(), phi.end(), 0);
      do {
        const auto table = table_from_permutation(phi);
        const auto b = reconstruct_bijection_finite(table);
        const auto f2 = reconstruct_bijection_finite(restrict_to_F2(table));
        const auto inv = reconstruct_bijection_finite(table.inverse());
        bool inverse_ok = true;
        for (int x = 0; x < n; ++x) inverse_ok = inverse_ok && inv.phi()[phi[x]] == x;
        t.record(0.0, b.phi() == phi && f2.phi() == phi && inverse_ok &&
                          b.certificate.all_pass());
      } while (std::next_permutation(phi.begin(), phi.end()));
    }
    return t;
  });
  for (int n : {3, 4}) {
    run_section(r, "reconstruct", "weak_jordan_round_trip_M" + std::to_string(n), [&, n] {
      Tally t;
      const AlgebraShape shape(std::vector<int>{n});
      for (int i = 0; i < 10; ++i) {
        Rng rng(seed * 1000 + static_cast<std::uint64_t>(100 * n + i));
        const auto probes = standard_probes(shape, rng, tol);
        const Generator g{random_unitary(n, rng), i % 2 == 1};
        const auto oracle = bohr_oracle_from_generator(g, shape, probes, tol);
        const auto impl = implement_jordan(glue_weak_jordan(oracle, probes, tol), tol);
        const auto z = phase_equivalence(g, impl.generator, 1.0);
        const double dev = z ? (impl.generator.u - *z * g.u).cwiseAbs().maxCoeff() : 1.0;
        t.record(dev, z.has_value() && dev <= 10 * tol.eq_tol && impl.certificate.all_pass());
      }
      return t;
    });
  }
  run_section(r, "reconstruct", "exceptional_algebras", [&] {
    Tally t;
    Rng rng(seed ^ 0x31);
    for (const auto& blocks : std::vector<std::vector<int>>{{2}, {1, 1}}) {
      const AlgebraShape shape(blocks);
      const auto probes = standard_probes(shape, rng, tol);
      const auto [id, swap] = exceptional_witness_pair(shape, probes, tol);
      t.record(0.0, same_bohr_action(id, swap, tol));
      const auto oracle = bohr_oracle_from_generator(Generator::identity(shape.total()), shape,
                                                     probes, tol);
      bool flagged = false;
      try {
        glue_weak_jordan(oracle, probes, tol);
      } catch (const ExceptionalAlgebra&) {
        flagged = true;
      }
      t.record(0.0, flagged);
    }
    return t;
  });
  run_section(r, "reconstruct", "orthoiso_from_bohr", [&] {
    Tally t;
    Rng rng(seed ^ 0x32);
    for (int n : {3, 4}) {
      const AlgebraShape shape(std::vector<int>{n});
      const auto probes = standard_probes(shape, rng, tol);
      const Generator g{random_unitary(n, rng), false};
      const auto oracle = bohr_oracle_from_generator(g, shape, probes, tol);
      std::vector<AlgebraElement> atoms;
      const Resolution d = Resolution::diagonal(shape);
      for (int mask = 1; mask < (1 << n) - 1; ++mask) {
        AlgebraElement e = AlgebraElement::zero(shape);
        for (int j = 0; j < n; ++j)
          if (mask & (1 << j)) e = e + d[j];
        atoms.push_back(e);
      }
      const auto res = orthoiso_from_bohr(oracle, atoms, tol);
      for (const auto& [e, fe] : res.map.pairs()) {
        const double dev = (fe - g.act(e, shape)).norm();
        t.record(dev, dev <= 10 * tol.eq_tol);
      }
      t.record(0.0, res.certificate.all_pass());
    }
    return t;
  });
}

}  // namespace suites

/// Runs one named suite, or all of them for "all".
inline SuiteReport run_suite(const std::string& name, std::uint64_t seed, const Tolerance& tol) {
  SuiteReport report{name, seed, tol.eq_tol, {}};
  auto run_one = [&](const std::string& s) {
    if (s == "partitions") suites::partitions_suite(report, seed, tol);
    if (s == "symmetry") suites::symmetry_suite(report, seed, tol);
    if (s == "omp") suites::omp_suite(report, seed, tol);
    if (s == "reconstruct") suites::reconstruct_suite(report, seed, tol);
  };
  if (name == "all") {
    for (const auto& s : suite_names()) run_one(s);
  } else if (std::find(suite_names().begin(), suite_names().end(), name) != suite_names().end()) {
    run_one(name);
  } else {
    throw PreconditionError("unknown suite \"" + name + "\"");
  }
  return report;
}

inline Json to_json(const SuiteReport& r) {
  Json sections = Json::array();
  for (const auto& s : r.sections) {
    Json j = {{"suite", s.suite},
              {"name", s.name},
              {"pass", s.pass},
              {"count", s.count},
              {"max_deviation", s.max_deviation}};
    if (!s.error.empty()) j["error"] = s.error;
    sections.push_back(std::move(j));
  }
  return {{"suite", r.suite},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"pass", r.pass()},
          {"sections", std::move(sections)}};
}

}  // namespace bohrlat
