// Acceptance run: one PASS/FAIL line per criterion. Expected values come
// from independent computations in this file, not from the library.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "bohrlat/cli.hpp"

using namespace bohrlat;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " (over time budget)";
  }
  if (!o.pass) ++failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << title << ": " << o.detail << " [" << secs
       << " s]";
  std::cout << line.str() << std::endl;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", x);
  return buf;
}

// Bell numbers from the Bell triangle.
std::vector<long> bell_triangle(int n_max) {
  std::vector<long> out{1}, row{1};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<long> next{row.back()};
    for (long v : row) next.push_back(next.back() + v);
    out.push_back(row.back());
    row = std::move(next);
  }
  return out;  // out[n] = B_n
}

// p <= q in refinement order: every pair together in p is together in q.
bool finer(const Partition& p, const Partition& q) {
  for (int i = 0; i < p.size(); ++i) {
    for (int j = i + 1; j < p.size(); ++j) {
      if (p[i] == p[j] && q[i] != q[j]) return false;
    }
  }
  return true;
}

bool one_nontrivial_block(const Partition& p) {
  std::vector<int> sizes(p.size(), 0);
  for (int i = 0; i < p.size(); ++i) ++sizes[p[i]];
  int big = 0;
  for (int s : sizes) big += s > 1 ? 1 : 0;
  return big == 1;
}

// All order automorphisms of the partition lattice, by backtracking over
// images that preserve rank and the order relation.
std::vector<std::vector<int>> partition_automorphisms(const std::vector<Partition>& ps) {
  const int m = static_cast<int>(ps.size());
  std::vector<std::vector<bool>> leq(m, std::vector<bool>(m));
  std::vector<int> rank(m);
  for (int i = 0; i < m; ++i) {
    rank[i] = ps[i].block_count();
    for (int j = 0; j < m; ++j) leq[i][j] = finer(ps[i], ps[j]);
  }
  std::vector<std::vector<int>> out;
  std::vector<int> img(m, -1);
  std::vector<bool> used(m, false);
  std::function<void(int)> go = [&](int i) {
    if (i == m) {
      out.push_back(img);
      return;
    }
    for (int c = 0; c < m; ++c) {
      if (used[c] || rank[c] != rank[i]) continue;
      bool ok = true;
      for (int k = 0; k < i && ok; ++k) ok = leq[k][i] == leq[img[k]][c] && leq[i][k] == leq[c][img[k]];
      if (!ok) continue;
      img[i] = c;
      used[c] = true;
      go(i + 1);
      used[c] = false;
    }
    img[i] = -1;
  };
  go(0);
  return out;
}

Matrix projector_onto(const Vector& v) { return v * v.adjoint() / v.squaredNorm(); }

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

int run_cli_code(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

int main() {
  std::cout << "bohrlat acceptance" << std::endl;

  criterion(1, "partition counts are the Bell numbers for n = 1..6", 1.0, [] {
    const auto bell = bell_triangle(6);
    const std::vector<long> printed{1, 2, 5, 15, 52, 203};
    bool ok = true;
    std::string got;
    for (int n = 1; n <= 6; ++n) {
      const long c = static_cast<long>(enumerate_partitions(n).size());
      ok = ok && c == bell[n] && c == printed[n - 1];
      got += (n > 1 ? "," : "") + std::to_string(c);
    }
    return Outcome{ok, "counts " + got};
  });

  criterion(2, "order-theoretic F2 test matches one-nontrivial-block for n <= 7", 10.0, [] {
    long checked = 0, bad = 0;
    for (int n = 1; n <= 7; ++n) {
      const PartitionLattice lattice(n);
      for (const auto& p : lattice.elements()) {
        ++checked;
        if (is_F2_order_theoretic(p, lattice) != one_nontrivial_block(p)) ++bad;
      }
    }
    return Outcome{bad == 0, std::to_string(checked) + " partitions, " + std::to_string(bad) + " disagreements"};
  });

  criterion(3, "automorphisms of the partition lattices on 3 and 4 points come from bijections", 120.0, [] {
    bool ok = true;
    std::string detail;
    for (int n : {3, 4}) {
      const auto ps = enumerate_partitions(n);
      const auto autos = partition_automorphisms(ps);
      long fact = 1;
      for (int k = 2; k <= n; ++k) fact *= k;
      ok = ok && static_cast<long>(autos.size()) == fact;
      std::set<std::vector<int>> recovered;
      for (const auto& a : autos) {
        LatticeIsoTable t(n, n);
        for (std::size_t i = 0; i < ps.size(); ++i) t.add(ps[i], ps[a[i]]);
        const auto r = reconstruct_bijection_finite(t);
        ok = ok && r.unique && r.certificate.all_pass();
        // The recovered bijection must reproduce the automorphism on every partition.
        const auto phi = r.phi();
        for (std::size_t i = 0; i < ps.size(); ++i) {
          std::vector<int> labels(n);
          for (int x = 0; x < n; ++x) labels[phi[x]] = ps[i][x];
          ok = ok && Partition::from_labels(std::span<const int>(labels)) == ps[a[i]];
        }
        recovered.insert(phi);
      }
      ok = ok && static_cast<long>(recovered.size()) == fact;
      detail += (n > 3 ? ", " : "") + std::string("n=") + std::to_string(n) + ": " +
                std::to_string(autos.size()) + " automorphisms, " + std::to_string(recovered.size()) +
                " bijections";
    }
    return Outcome{ok, detail};
  });

  criterion(4, "Bohr data of random (anti)unitaries on M3 and M4 reconstruct the generator", 60.0, [] {
    double worst = 0.0;
    int good = 0, total = 0;
    for (int n : {3, 4}) {
      const AlgebraShape s(std::vector<int>{n});
      for (int i = 0; i < 100; ++i) {
        ++total;
        Rng rng(1000 * n + i);
        const auto probes = standard_probes(s, rng);
        const Generator g{random_unitary(n, rng), i % 2 == 1};
        const auto o = bohr_oracle_from_generator(g, s, probes);
        const auto impl = implement_jordan(glue_weak_jordan(o, probes));
        if (impl.generator.antiunitary != g.antiunitary) {
          worst = std::max(worst, 1.0);
          continue;
        }
        // Best phase: z = <u, v> / |<u, v>| in the Hilbert-Schmidt pairing.
        const Complex ip = (g.u.adjoint() * impl.generator.u).trace();
        const Complex z = ip / std::abs(ip);
        const double dev = max_abs(impl.generator.u - z * g.u);
        worst = std::max(worst, dev);
        if (dev <= 1e-8 && impl.certificate.all_pass()) ++good;
      }
    }
    return Outcome{good == total, std::to_string(good) + "/" + std::to_string(total) +
                                      " recovered, max deviation " + sci(worst) + " (tol 1e-8)"};
  });

  criterion(5, "C^2 and M_2 admit distinct maps with identical Bohr data and are reported", 10.0, [] {
    bool ok = true;
    std::string detail;
    for (const auto& blocks : std::vector<std::vector<int>>{{2}, {1, 1}}) {
      const AlgebraShape s(blocks);
      Rng rng(5);
      const auto [id, swap] = exceptional_witness_pair(s, standard_probes(s, rng));
      const AlgebraElement e = Resolution::diagonal(s)[0];
      const bool distinct = max_abs((id.apply(e) - swap.apply(e)).to_full()) > 0.5;
      ok = ok && same_bohr_action(id, swap) && distinct;
    }
    for (const std::string shape : {"2", "1,1"}) {
      std::string e1, e2;
      const int c1 = run_cli_code({"reconstruct", "--shape", shape}, &e1);
      const int c2 = run_cli_code({"reconstruct", "--shape", shape}, &e2);
      ok = ok && c1 == 5 && c2 == 5 && e1 == e2;
      detail += (detail.empty() ? "" : ", ") + std::string("--shape ") + shape + " exits " + std::to_string(c1);
    }
    return Outcome{ok, "witness pairs agree on all probes; " + detail};
  });

  criterion(6, "trace distance of pure states equals 2 sqrt(1 - TP), dims 2..6", 30.0, [] {
    double worst = 0.0;
    Rng rng(6);
    for (int n = 2; n <= 6; ++n) {
      for (int i = 0; i < 1000; ++i) {
        const Vector u = random_gaussian_vector(n, rng), v = random_gaussian_vector(n, rng);
        const double tp = std::norm(u.dot(v)) / (u.squaredNorm() * v.squaredNorm());
        const Matrix e = projector_onto(u), f = projector_onto(v);
        worst = std::max(worst, std::abs(trace_norm(e - f) - 2.0 * std::sqrt(1.0 - tp)));
        worst = std::max(worst, std::abs(transition_probability(e, f) - tp));
      }
    }
    return Outcome{worst <= 1e-8, "5000 pairs, max deviation " + sci(worst) + " (tol 1e-8)"};
  });

  criterion(7, "Kadison extension does not depend on the eigenbasis of a degenerate state", 30.0, [] {
    double worst = 0.0;
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
      const int n = 3 + i % 3;
      std::vector<double> spec(n, 0.0);
      spec[0] = spec[1] = 0.25;
      for (int k = 2; k < n; ++k) spec[k] = 0.5 / (n - 2);
      const auto rho = DensityMatrix::make(random_with_spectrum(spec, rng));
      const Generator g{random_unitary(n, rng), i % 2 == 0};
      const auto w = wigner_of(g);
      const Matrix k1 = kadison_from_wigner(w, random_eigen_expansion(rho, rng));
      const Matrix k2 = kadison_from_wigner(w, random_eigen_expansion(rho, rng));
      const Matrix direct = g.antiunitary ? Matrix(g.u * rho.matrix().conjugate() * g.u.adjoint())
                                          : Matrix(g.u * rho.matrix() * g.u.adjoint());
      worst = std::max({worst, max_abs(k1 - k2), max_abs(k1 - direct)});
    }
    return Outcome{worst <= 1e-9, "100 states, max deviation " + sci(worst) + " (tol 1e-9)"};
  });

  criterion(8, "spectral extension is additive for unitaries, not for the twist map", 30.0, [] {
    double worst = 0.0;
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
      const int n = 3 + i % 3;
      const Generator g{random_unitary(n, rng), false};
      const auto map = projection_map_of(g);
      const Matrix a = random_hermitian(n, rng), b = random_hermitian(n, rng);
      const Matrix sum = vonneumann_extend(map, Matrix(a + b));
      worst = std::max(worst, max_abs(sum - vonneumann_extend(map, a) - vonneumann_extend(map, b)));
      // Independent: the extension must equal u a u* itself.
      worst = std::max(worst, max_abs(vonneumann_extend(map, a) - g.u * a * g.u.adjoint()));
    }
    const auto wild = qubit_twist_map(1.0);
    Matrix sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    const double violation = max_abs(vonneumann_extend(wild, Matrix(sx + sz)) - vonneumann_extend(wild, sx) -
                                     vonneumann_extend(wild, sz));
    return Outcome{worst <= 1e-9 && violation > 1e-3, "200 pairs, max deviation " + sci(worst) +
                                                          " (tol 1e-9); twist violation " + sci(violation)};
  });

  criterion(9, "projection lattices are orthomodular; Boolean subalgebras match commutative ones", 60.0, [] {
    long pairs = 0, bad = 0;
    double worst = 0.0;
    Rng rng(9);
    for (const auto& blocks : std::vector<std::vector<int>>{{2}, {3}, {2, 1}, {2, 2}}) {
      const AlgebraShape s(blocks);
      for (int i = 0; i < 1000; ++i) {
        const auto [p, q] = suites::random_nested_pair(s, rng, Tolerance{});
        ++pairs;
        // q - p is the expected p⊥ ∧ q when p <= q.
        const AlgebraElement m = proj_meet(ortho(p), q);
        const double dev = max_abs((m - (q - p)).to_full());
        worst = std::max(worst, dev);
        if (!orthomodular_check(p, q) || dev > 1e-9) ++bad;
      }
    }
    bool family_ok = true;
    const auto bell = bell_triangle(5);
    for (int n = 1; n <= 5; ++n) {
      const AlgebraShape cn(std::vector<int>(n, 1));
      const Resolution d = Resolution::diagonal(cn);
      std::vector<Resolution> family;
      for (const auto& p : enumerate_partitions(n)) family.push_back(partition_to_subalgebra(d, p));
      family_ok = family_ok && boolean_poset_iso_check(cn, family).ok();
      family_ok = family_ok && static_cast<long>(enumerate_diagonal_boolean_subalgebras(n).size()) == bell[n];
    }
    return Outcome{bad == 0 && family_ok, std::to_string(pairs) + " nested pairs, " + std::to_string(bad) +
                                              " failures, max deviation " + sci(worst) +
                                              "; diagonal families n <= 5 " + (family_ok ? "ok" : "bad")};
  });

  criterion(10, "transition probability is the infimum over effects dominating f", 30.0, [] {
    double worst = 0.0;
    long below = 0;
    Rng rng(10);
    for (int i = 0; i < 100; ++i) {
      const int n = 2 + i % 3;
      const Vector u = random_gaussian_vector(n, rng), v = random_gaussian_vector(n, rng);
      const Matrix e = projector_onto(u), f = projector_onto(v);
      const double tp = std::norm(u.dot(v)) / (u.squaredNorm() * v.squaredNorm());
      worst = std::max(worst, std::abs(tp_infimum_estimate(e, f, 50, 10 + i) - tp));
      const Matrix fperp = identity(n) - f;
      for (int k = 0; k < 20; ++k) {
        const Matrix a = f + fperp * random_effect(n, rng) * fperp;
        if ((e * a).trace().real() < tp - 1e-12) ++below;
      }
    }
    return Outcome{worst <= 1e-12 && below == 0, "100 pairs, max deviation " + sci(worst) +
                                                     " (tol 1e-12), " + std::to_string(below) +
                                                     " samples below TP"};
  });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
