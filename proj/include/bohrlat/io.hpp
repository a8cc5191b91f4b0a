#pragma once

// JSON forms of the library's types.
//
//   Matrix          {"n": 2, "data": [[[re, im], ...], ...]}   row-major
//   AlgebraShape    {"blocks": [2, 1]}
//   Partition       {"n": 3, "rgs": [0, 0, 1]}  (a bare rgs array is accepted)
//   Resolution      {"shape": ..., "projections": [[block0, block1, ...], ...]}
//                   (a projection may also be given as one full N x N matrix)
//   Generator       {"antiunitary": false, "u": matrix}
//   LatticeIsoTable {"n": 3, "map": [{"from": rgs, "to": rgs}, ...]}
//                   (optional "n_codomain" when it differs from "n")
//   BohrOracle      {"shape": ..., "entries": [{"from": res, "to": res}, ...]}
//                   (optional "shape_codomain" and "probes")

#include <json.hpp>

#include <string>
#include <vector>

#include "bohrlat/reconstruct.hpp"

namespace bohrlat {

using Json = nlohmann::json;

/// Input that does not follow the expected JSON schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

inline int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw FormatError(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

inline std::vector<int> int_array(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of integers");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw FormatError(std::string(what) + " must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace detail

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return {{"n", m.rows()}, {"data", std::move(rows)}};
}

/// Entries may be [re, im] pairs or plain reals.
inline Matrix matrix_from_json(const Json& j) {
  const int n = detail::int_field(j, "n");
  const Json& data = detail::field(j, "data");
  if (n < 1 || !data.is_array() || static_cast<int>(data.size()) != n) {
    throw FormatError("matrix: \"data\" must have n rows");
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!data[i].is_array() || static_cast<int>(data[i].size()) != n) {
      throw FormatError("matrix: every row must have n entries");
    }
    for (int k = 0; k < n; ++k) {
      const Json& e = data[i][k];
      if (e.is_number()) {
        m(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw FormatError("matrix: entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

inline Json to_json(const AlgebraShape& s) { return {{"blocks", s.blocks}}; }

inline AlgebraShape shape_from_json(const Json& j) {
  const auto blocks = detail::int_array(detail::field(j, "blocks"), "shape blocks");
  try {
    AlgebraShape s(blocks);
    s.validate();
    return s;
  } catch (const PreconditionError& e) {
    throw FormatError(e.what());
  }
}

inline Json to_json(const Partition& p) { return {{"n", p.size()}, {"rgs", p.rgs()}}; }

inline Partition partition_from_json(const Json& j) {
  const auto rgs = detail::int_array(j.is_object() ? detail::field(j, "rgs") : j, "rgs");
  if (j.is_object() && detail::int_field(j, "n") != static_cast<int>(rgs.size())) {
    throw FormatError("partition: n does not match the rgs length");
  }
  return Partition::from_rgs(std::span<const int>(rgs));
}

inline Json to_json(const AlgebraElement& a) {
  Json blocks = Json::array();
  for (const auto& b : a.blocks()) blocks.push_back(to_json(b));
  return blocks;
}

inline AlgebraElement element_from_json(const AlgebraShape& shape, const Json& j,
                                        const Tolerance& tol = {}) {
  if (j.is_object()) {
    const Matrix m = matrix_from_json(j);
    if (m.rows() != shape.total()) throw FormatError("element: full matrix has the wrong size");
    return AlgebraElement::from_full(shape, m, std::max(tol.eq_tol, 1e-9));
  }
  if (!j.is_array() || static_cast<int>(j.size()) != shape.block_count()) {
    throw FormatError("element: expected one matrix per block");
  }
  std::vector<Matrix> blocks;
  for (const auto& b : j) blocks.push_back(matrix_from_json(b));
  return {shape, std::move(blocks)};
}

inline Json to_json(const Resolution& r) {
  Json ps = Json::array();
  for (const auto& p : r.projections()) ps.push_back(to_json(p));
  return {{"shape", to_json(r.shape())}, {"projections", std::move(ps)}};
}

inline Resolution resolution_from_json(const Json& j, const Tolerance& tol = {}) {
  const AlgebraShape shape = shape_from_json(detail::field(j, "shape"));
  const Json& ps = detail::field(j, "projections");
  if (!ps.is_array()) throw FormatError("resolution: \"projections\" must be an array");
  std::vector<AlgebraElement> elems;
  for (const auto& p : ps) elems.push_back(element_from_json(shape, p, tol));
  return Resolution::make(shape, std::move(elems), tol);
}

inline Json to_json(const Generator& g) {
  return {{"antiunitary", g.antiunitary}, {"u", to_json(g.u)}};
}

inline Generator generator_from_json(const Json& j) {
  const Json& anti = detail::field(j, "antiunitary");
  if (!anti.is_boolean()) throw FormatError("generator: \"antiunitary\" must be a boolean");
  Generator g{matrix_from_json(detail::field(j, "u")), anti.get<bool>()};
  g.validate();
  return g;
}

inline Json to_json(const LatticeIsoTable& t) {
  Json map = Json::array();
  for (const auto& [from, to] : t.entries()) map.push_back({{"from", from.rgs()}, {"to", to.rgs()}});
  Json j = {{"n", t.n_domain()}, {"map", std::move(map)}};
  if (t.n_codomain() != t.n_domain()) j["n_codomain"] = t.n_codomain();
  return j;
}

inline LatticeIsoTable lattice_table_from_json(const Json& j) {
  const int n = detail::int_field(j, "n");
  const int m = j.contains("n_codomain") ? detail::int_field(j, "n_codomain") : n;
  const Json& map = detail::field(j, "map");
  if (!map.is_array()) throw FormatError("table: \"map\" must be an array");
  LatticeIsoTable t(n, m);
  for (const auto& e : map) {
    t.add(partition_from_json(detail::field(e, "from")), partition_from_json(detail::field(e, "to")));
  }
  return t;
}

inline Json to_json(const BohrOracle& o) {
  Json entries = Json::array();
  for (const auto& [from, to] : o.entries()) {
    entries.push_back({{"from", to_json(from)}, {"to", to_json(to)}});
  }
  Json j = {{"shape", to_json(o.domain_shape())}, {"entries", std::move(entries)}};
  if (!(o.codomain_shape() == o.domain_shape())) j["shape_codomain"] = to_json(o.codomain_shape());
  if (!o.probes().empty()) {
    Json probes = Json::array();
    for (const auto& d : o.probes()) probes.push_back(to_json(d));
    j["probes"] = std::move(probes);
  }
  return j;
}

/// Without a "probes" field, every maximal abelian entry becomes a probe.
inline BohrOracle bohr_oracle_from_json(const Json& j, const Tolerance& tol = {}) {
  const AlgebraShape dom = shape_from_json(detail::field(j, "shape"));
  const AlgebraShape cod =
      j.contains("shape_codomain") ? shape_from_json(j.at("shape_codomain")) : dom;
  BohrOracle o(dom, cod, std::max(tol.eq_tol, 1e-8));
  const Json& entries = detail::field(j, "entries");
  if (!entries.is_array()) throw FormatError("oracle: \"entries\" must be an array");
  for (const auto& e : entries) {
    Resolution from = resolution_from_json(detail::field(e, "from"), tol);
    Resolution to = resolution_from_json(detail::field(e, "to"), tol);
    if (!(from.shape() == dom) || !(to.shape() == cod)) {
      throw FormatError("oracle: entry shape differs from the declared shapes");
    }
    o.add(std::move(from), std::move(to));
  }
  if (j.contains("probes")) {
    for (const auto& p : j.at("probes")) o.add_probe(resolution_from_json(p, tol));
  } else {
    for (const auto& [from, to] : o.entries()) {
      if (is_maximal_abelian(from)) o.add_probe(from);
    }
  }
  return o;
}

inline Json to_json(const Certificate& c) {
  Json checks = Json::array();
  for (const auto& k : c.checks) {
    Json e = {{"name", k.name}, {"pass", k.pass}, {"deviation", k.deviation}};
    if (!k.pass && !k.detail.empty()) e["detail"] = k.detail;
    checks.push_back(std::move(e));
  }
  return {{"pass", c.all_pass()}, {"checks", std::move(checks)}};
}

}  // namespace bohrlat
