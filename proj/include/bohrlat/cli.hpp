#pragma once

// The bohrlat command line: poset, reconstruct and verify subcommands.
// run() works on in-memory streams so it can be driven from tests.
//
// Exit codes: 0 ok, 1 verification failure, 2 malformed input,
// 3 size limit, 4 reconstruction failure, 5 exceptional algebra.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bohrlat/suites.hpp"

namespace bohrlat::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kMalformed = 2,
  kSizeLimit = 3,
  kReconstructionFailed = 4,
  kExceptional = 5,
};

inline constexpr int kMaxPosetN = 8;
inline constexpr int kMaxDotN = 6;

struct RunConfig {
  std::optional<int> n;
  std::string shape;
  std::string input;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  bool dot = false;
  std::string suite = "all";
  std::string out;
};

/// Raised inside a subcommand to leave with a specific exit code.
struct Exit {
  int code;
  std::string message;
};

inline Tolerance tolerance_of(const RunConfig& cfg) {
  Tolerance tol;
  if (const char* env = std::getenv("BOHRLAT_TOL"); env && *env) {
    try {
      std::size_t used = 0;
      tol.eq_tol = std::stod(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw Exit{kMalformed, std::string("BOHRLAT_TOL is not a number: ") + env};
    }
  }
  if (cfg.tol) tol = Tolerance::uniform(*cfg.tol);
  try {
    tol.validate();
  } catch (const PreconditionError& e) {
    throw Exit{kMalformed, e.what()};
  }
  return tol;
}

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw Exit{kMalformed, "cannot write " + cfg.out};
  f << text;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Exit{kMalformed, "cannot read " + path};
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw Exit{kMalformed, path + ": " + e.what()};
  }
}

inline AlgebraShape parse_shape(const std::string& text) {
  std::vector<int> blocks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      blocks.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Exit{kMalformed, "--shape expects comma-separated block sizes, got \"" + text + "\""};
    }
  }
  AlgebraShape s(blocks);
  try {
    s.validate();
  } catch (const PreconditionError& e) {
    throw Exit{kMalformed, e.what()};
  }
  return s;
}

// ---------------------------------------------------------------------------
// poset

/// Covers of every partition of an n-set, found by merging pairs of blocks.
inline std::vector<std::pair<Partition, Partition>> lattice_covers(
    const std::vector<Partition>& elements) {
  std::vector<std::pair<Partition, Partition>> out;
  for (const auto& p : elements) {
    const int k = p.block_count();
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        std::vector<int> labels(p.size());
        for (int i = 0; i < p.size(); ++i) labels[i] = p[i] == b ? a : p[i];
        out.emplace_back(p, Partition::from_labels(std::span<const int>(labels)));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string poset_dot(int n) {
  const auto elements = enumerate_partitions(n);
  std::ostringstream dot;
  dot << "digraph partitions_" << n << " {\n  rankdir=BT;\n";
  for (const auto& p : elements) dot << "  \"" << p.to_string() << "\";\n";
  for (const auto& [lo, hi] : lattice_covers(elements)) {
    dot << "  \"" << lo.to_string() << "\" -> \"" << hi.to_string() << "\";\n";
  }
  dot << "}\n";
  return dot.str();
}

inline Json poset_json(int n) {
  const auto elements = enumerate_partitions(n);
  Json elems = Json::array(), f2 = Json::array(), covers = Json::array(), at = Json::array();
  for (const auto& p : elements) {
    elems.push_back(p.to_string());
    if (is_F2_direct(p)) f2.push_back(p.to_string());
  }
  for (const auto& a : atoms(n)) at.push_back(a.to_string());
  for (const auto& [lo, hi] : lattice_covers(elements)) {
    covers.push_back({lo.to_string(), hi.to_string()});
  }
  return {{"n", n},          {"count", elements.size()},  {"elements", std::move(elems)},
          {"atoms", std::move(at)}, {"covers", std::move(covers)}, {"F2", std::move(f2)}};
}

inline int cmd_poset(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.n) throw Exit{kMalformed, "poset needs --n"};
  const int n = *cfg.n;
  if (n < 1) throw Exit{kMalformed, "--n must be at least 1"};
  if (n > kMaxPosetN) {
    throw Exit{kSizeLimit, "poset: n = " + std::to_string(n) + " exceeds the enumeration limit " +
                               std::to_string(kMaxPosetN)};
  }
  if (cfg.dot && n > kMaxDotN) {
    throw Exit{kSizeLimit, "poset: n = " + std::to_string(n) + " exceeds the DOT limit " +
                               std::to_string(kMaxDotN)};
  }
  emit(cfg, cfg.dot ? poset_dot(n) : poset_json(n).dump(2) + "\n", out);
  return kOk;
}

// ---------------------------------------------------------------------------
// reconstruct

inline Json reconstruct_table(const LatticeIsoTable& t) {
  const auto b = reconstruct_bijection_finite(t);
  if (!b.unique) {
    std::string cand;
    for (const auto& phi : b.bijections) cand += "phi = " + detail::perm_string(phi) + "\n";
    throw ExceptionalAlgebra("the table lives on a two-point set, so C(X) = C^2", cand);
  }
  Json j = {{"kind", "lattice_table"}, {"n", t.n_domain()}, {"phi", b.phi()}, {"unique", true}};
  if (t.n_domain() > 2) {
    const auto s = reconstruct_star_iso_commutative(t);
    j["permutation"] = to_json(s.permutation);
    j["certificate"] = to_json(s.certificate);
  } else {
    j["certificate"] = to_json(b.certificate);
  }
  return j;
}

inline Json reconstruct_oracle(const BohrOracle& o, const Tolerance& tol,
                               const std::optional<Generator>& source) {
  if (o.probes().empty()) throw InconsistentOracle("the oracle names no maximal abelian probe");
  auto w = glue_weak_jordan(o, o.probes(), tol);
  Json j = {{"kind", "bohr_oracle"},
            {"shape", to_json(o.domain_shape())},
            {"probes", o.probes().size()},
            {"entries", o.entries().size()}};
  Certificate cert = w.certificate();
  const AlgebraShape& shape = o.domain_shape();
  if (shape.is_single_block() && o.codomain_shape() == shape) {
    const auto impl = implement_jordan(w, tol);
    cert = impl.certificate;
    j["generator"] = to_json(impl.generator);
    if (source) {
      const auto z = phase_equivalence(*source, impl.generator, 1.0);
      const double dev = z ? (impl.generator.u - *z * source->u).cwiseAbs().maxCoeff() : 1.0;
      cert.add("recovered generator equals the source up to a phase",
               z.has_value() && dev <= 10 * tol.eq_tol, dev);
      j["source_generator"] = to_json(*source);
    }
  }
  j["certificate"] = to_json(cert);
  return j;
}

inline int cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
  const Tolerance tol = tolerance_of(cfg);
  enum class Kind { table, oracle } kind;
  LatticeIsoTable table;
  BohrOracle oracle;
  std::optional<Generator> source;

  try {
    if (!cfg.input.empty()) {
      const Json j = read_json_file(cfg.input);
      if (j.contains("map")) {
        kind = Kind::table;
        table = lattice_table_from_json(j);
      } else if (j.contains("entries")) {
        kind = Kind::oracle;
        oracle = bohr_oracle_from_json(j, tol);
      } else {
        throw FormatError("input is neither a lattice table (\"map\") nor an oracle (\"entries\")");
      }
    } else if (cfg.n) {
      if (*cfg.n < 1 || *cfg.n > kMaxGround) {
        throw Exit{kSizeLimit, "--n must be in [1, " + std::to_string(kMaxGround) + "]"};
      }
      kind = Kind::table;
      std::vector<int> phi(*cfg.n);
      std::iota(phi.begin(), phi.end(), 0);
      Rng rng(cfg.seed);
      std::shuffle(phi.begin(), phi.end(), rng);
      table = table_from_permutation(phi);
    } else if (!cfg.shape.empty()) {
      kind = Kind::oracle;
      const AlgebraShape shape = parse_shape(cfg.shape);
      if (shape.total() > 6) throw Exit{kSizeLimit, "--shape: total size above 6"};
      Rng rng(cfg.seed);
      const auto probes = standard_probes(shape, rng, tol);
      const Generator g{shape.is_single_block() ? random_unitary(shape.total(), rng)
                                                : random_unitary(shape, rng).to_full(),
                        shape.is_single_block() && cfg.seed % 2 == 1};
      oracle = bohr_oracle_from_generator(g, shape, probes, tol);
      if (shape.is_single_block()) source = g;
    } else {
      throw Exit{kMalformed, "reconstruct needs --input, --n or --shape"};
    }
  } catch (const Json::exception& e) {
    throw Exit{kMalformed, e.what()};
  } catch (const FormatError& e) {
    throw Exit{kMalformed, e.what()};
  } catch (const PreconditionError& e) {
    throw Exit{kMalformed, e.what()};
  } catch (const DimensionMismatch& e) {
    throw Exit{kMalformed, e.what()};
  }

  Json report;
  try {
    report = kind == Kind::table ? reconstruct_table(table) : reconstruct_oracle(oracle, tol, source);
  } catch (const ExceptionalAlgebra& e) {
    throw Exit{kExceptional, std::string("ambiguous: ") + e.what() +
                                 "\nC^2 and M_2(C) are the exceptional cases: there the order "
                                 "structure does not determine the symmetry.\ncandidates:\n" +
                                 e.candidates()};
  } catch (const Error& e) {
    throw Exit{kReconstructionFailed, std::string("reconstruction failed: ") + e.what()};
  }
  emit(cfg, report.dump(2) + "\n", out);
  if (!report["certificate"]["pass"].get<bool>()) {
    for (const auto& c : report["certificate"]["checks"]) {
      if (!c["pass"].get<bool>()) {
        throw Exit{kReconstructionFailed,
                   "reconstruction failed: identity " + c["name"].get<std::string>() + " fails"};
      }
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Tolerance tol = tolerance_of(cfg);
  if (cfg.suite != "all" &&
      std::find(suite_names().begin(), suite_names().end(), cfg.suite) == suite_names().end()) {
    throw Exit{kMalformed, "unknown suite \"" + cfg.suite + "\""};
  }
  const SuiteReport report = run_suite(cfg.suite, cfg.seed, tol);
  emit(cfg, to_json(report).dump(2) + "\n", out);
  for (const auto& s : report.sections) {
    if (!s.pass) err << "FAIL " << s.suite << "/" << s.name << (s.error.empty() ? "" : ": " + s.error) << "\n";
  }
  return report.pass() ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bohrlat: commutative subalgebras, partition lattices and symmetry reconstruction"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "PRNG seed");
    sub->add_option("--tol", cfg.tol, "equality tolerance (overrides BOHRLAT_TOL)");
    sub->add_option("--out", cfg.out, "write the report to a file instead of stdout");
  };
  auto* poset = app.add_subcommand("poset", "partition lattice of an n-set");
  poset->add_option("--n", cfg.n, "ground set size")->required();
  poset->add_flag("--dot", cfg.dot, "emit the Hasse diagram as DOT");
  poset->add_option("--out", cfg.out, "write to a file instead of stdout");

  auto* rec = app.add_subcommand("reconstruct", "recover a symmetry from order data");
  rec->add_option("--input", cfg.input, "lattice table or Bohr oracle JSON");
  rec->add_option("--n", cfg.n, "random permutation table on n points");
  rec->add_option("--shape", cfg.shape, "synthetic oracle for a random symmetry, e.g. 3 or 2,1");
  common(rec);

  auto* ver = app.add_subcommand("verify", "run property suites");
  ver->add_option("--suite", cfg.suite, "partitions, symmetry, omp, reconstruct or all");
  common(ver);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << e.what() << "\n";
    return kMalformed;
  }

  try {
    if (poset->parsed()) return cmd_poset(cfg, out);
    if (rec->parsed()) return cmd_reconstruct(cfg, out);
    return cmd_verify(cfg, out, err);
  } catch (const Exit& e) {
    err << e.message << "\n";
    return e.code;
  }
}

}  // namespace bohrlat::cli
