#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symplinv/census.hpp"
#include "symplinv/factorize.hpp"

// JSON forms. Scalars are strings ("3/4", "5"); plain integers are accepted on
// input. A matrix is a list of rows; the field travels once per document.
namespace symplinv::io {

using nlohmann::json;

inline json scalar_to_json(const Scalar& s) { return s.to_string(); }

inline Scalar scalar_from_json(const Field& f, const json& j) {
  if (j.is_string()) return f.parse(j.get<std::string>());
  if (j.is_number_integer()) return f.parse(std::to_string(j.get<long long>()));
  fail(ErrorCode::ParseError, "scalar must be a string or an integer");
}

inline json rows_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix rows_from_json(const Field& f, const json& j) {
  require(j.is_array(), ErrorCode::ParseError, "matrix must be a list of rows");
  std::size_t rows = j.size();
  std::size_t cols = rows == 0 ? 0 : j[0].size();
  Matrix m(f, rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    require(j[i].is_array() && j[i].size() == cols, ErrorCode::ParseError, "matrix rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = scalar_from_json(f, j[i][c]);
  }
  return m;
}

inline Field field_from_json(const json& j) {
  require(j.is_object() && j.contains("field") && j["field"].is_string(), ErrorCode::ParseError, "missing field name");
  return Field::from_name(j["field"].get<std::string>());
}

inline json matrix_to_json(const Matrix& m) { return {{"field", m.field().name()}, {"entries", rows_to_json(m)}}; }

inline Matrix matrix_from_json(const json& j) {
  Field f = field_from_json(j);
  require(j.contains("entries"), ErrorCode::ParseError, "missing entries");
  return rows_from_json(f, j["entries"]);
}

inline json space_to_json(const SymplecticSpace& s) { return {{"field", s.field().name()}, {"gram", rows_to_json(s.gram())}}; }

// Any structural problem is a parse error, including a Gram matrix that is
// not a valid symplectic form.
inline SymplecticSpace space_from_json(const json& j, std::size_t dim_hint = 0) {
  Field f = field_from_json(j);
  Matrix gram;
  if (j.contains("gram")) {
    gram = rows_from_json(f, j["gram"]);
  } else {
    require(dim_hint % 2 == 0 && dim_hint > 0, ErrorCode::ParseError, "cannot infer the standard form");
    gram = standard_gram(f, dim_hint);
  }
  try {
    return SymplecticSpace(gram);
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, std::string("invalid Gram matrix: ") + e.what());
  }
}

inline json pair_to_json(const SPair& p) {
  return {{"field", p.field().name()}, {"gram", rows_to_json(p.space.gram())}, {"u", rows_to_json(p.u)}};
}

// The Gram matrix defaults to the standard form of the size of u.
inline SPair pair_from_json(const json& j) {
  Field f = field_from_json(j);
  require(j.contains("u"), ErrorCode::ParseError, "missing u");
  Matrix u = rows_from_json(f, j["u"]);
  require(u.is_square(), ErrorCode::ParseError, "u must be square");
  SymplecticSpace space = space_from_json(j, u.rows());
  require(space.dim() == u.rows(), ErrorCode::ParseError, "u and the Gram matrix differ in size");
  return SPair(std::move(space), std::move(u));
}

inline json certificate_to_json(const Certificate& c);

inline json step_to_json(const Step& s) {
  json subs = json::array();
  for (const auto& sub : s.subs) subs.push_back(certificate_to_json(sub));
  return {{"step", s.step}, {"rule", s.rule}, {"seed", s.seed}, {"note", s.note}, {"subs", std::move(subs)}};
}

inline json certificate_to_json(const Certificate& c) {
  json factors = json::array();
  for (const auto& m : c.factors) factors.push_back(rows_to_json(m));
  json transcript = json::array();
  for (const auto& s : c.transcript) transcript.push_back(step_to_json(s));
  return {{"space", space_to_json(c.space)},
          {"target", rows_to_json(c.target)},
          {"factors", std::move(factors)},
          {"transcript", std::move(transcript)}};
}

inline Certificate certificate_from_json(const json& j);

inline Step step_from_json(const json& j) {
  require(j.is_object(), ErrorCode::ParseError, "transcript entries must be objects");
  Step s;
  s.step = j.value("step", "");
  s.rule = j.value("rule", "");
  s.seed = j.value("seed", std::uint64_t{0});
  s.note = j.value("note", "");
  if (j.contains("subs")) {
    for (const auto& sub : j["subs"]) s.subs.push_back(certificate_from_json(sub));
  }
  return s;
}

// Shapes are checked against the Gram matrix here; mathematical properties
// are left to verify_certificate.
inline Certificate certificate_from_json(const json& j) {
  require(j.is_object() && j.contains("space") && j.contains("target") && j.contains("factors"), ErrorCode::ParseError,
          "certificate needs space, target and factors");
  Certificate c;
  c.space = space_from_json(j["space"]);
  const Field& f = c.space.field();
  std::size_t n = c.space.dim();
  c.target = rows_from_json(f, j["target"]);
  require(c.target.rows() == n && c.target.cols() == n, ErrorCode::ParseError, "target size differs from the Gram matrix");
  require(j["factors"].is_array(), ErrorCode::ParseError, "factors must be a list");
  for (const auto& m : j["factors"]) {
    c.factors.push_back(rows_from_json(f, m));
    require(c.factors.back().rows() == n && c.factors.back().cols() == n, ErrorCode::ParseError,
            "factor size differs from the Gram matrix");
  }
  if (j.contains("transcript")) {
    for (const auto& s : j["transcript"]) c.transcript.push_back(step_from_json(s));
  }
  return c;
}

inline json report_to_json(const census::CheckReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"all_passed", r.all_passed()}, {"checks", std::move(checks)}};
}

}  // namespace symplinv::io
