#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "matrixchaos/errors.hpp"
#include "matrixchaos/hermitian_matrix.hpp"

namespace mxc {

/// Double formatted with 17 significant digits (round-trip exact).
inline std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Loads a matrix document. Schema: object with
///   v:              matrix size (positive integer)
///   entries:        array of [row, col, re, im] triplets (0-based), or
///   dense:          row-major array of [re, im] pairs, length v*v
///   symmetrize:     optional bool, complete missing conjugate triplets
///   zero_threshold: optional positive real, default 1e-14
inline HermitianMatrix load_matrix_document(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("matrix document must be a JSON object");
  if (!doc.contains("v") || !doc["v"].is_number_integer() || doc["v"].get<long long>() <= 0)
    throw ParseError("field 'v' must be a positive integer");
  const int v = doc["v"].get<int>();

  MatrixOptions opts;
  if (doc.contains("symmetrize")) {
    if (!doc["symmetrize"].is_boolean()) throw ParseError("'symmetrize' must be a boolean");
    opts.symmetrize = doc["symmetrize"].get<bool>();
  }
  if (doc.contains("zero_threshold")) {
    if (!doc["zero_threshold"].is_number()) throw ParseError("'zero_threshold' must be a number");
    opts.zero_threshold = doc["zero_threshold"].get<double>();
    if (!(opts.zero_threshold >= 0.0)) throw ParseError("'zero_threshold' must be non-negative");
  }

  const bool has_entries = doc.contains("entries");
  const bool has_dense = doc.contains("dense");
  if (has_entries == has_dense)
    throw ParseError("matrix document needs exactly one of 'entries' or 'dense'");

  if (has_entries) {
    if (!doc["entries"].is_array()) throw ParseError("'entries' must be an array");
    std::vector<std::tuple<int, int, Complex>> triplets;
    triplets.reserve(doc["entries"].size());
    for (const auto& item : doc["entries"]) {
      if (!item.is_array() || item.size() != 4 || !item[0].is_number_integer() ||
          !item[1].is_number_integer() || !item[2].is_number() || !item[3].is_number())
        throw ParseError("each entry must be [row, col, re, im]");
      triplets.emplace_back(item[0].get<int>(), item[1].get<int>(),
                            Complex(item[2].get<double>(), item[3].get<double>()));
    }
    return HermitianMatrix::from_triplets(v, triplets, opts);
  }

  const auto& dense = doc["dense"];
  if (!dense.is_array() || dense.size() != static_cast<std::size_t>(v) * v)
    throw ParseError("'dense' must be an array of length v*v");
  ComplexMatrix m(v, v);
  for (int r = 0; r < v; ++r)
    for (int c = 0; c < v; ++c) {
      const auto& item = dense[static_cast<std::size_t>(r) * v + c];
      if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
        throw ParseError("dense entries must be [re, im] pairs");
      m(r, c) = Complex(item[0].get<double>(), item[1].get<double>());
    }
  return HermitianMatrix::from_dense(m, opts);
}

inline HermitianMatrix load_matrix_string(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return load_matrix_document(doc);
}

inline HermitianMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_matrix_string(buffer.str());
}

/// Serializes a matrix as an explicit triplet document (all stored nonzero
/// entries, both triangles); loading it reproduces the matrix exactly.
inline nlohmann::ordered_json matrix_document(const HermitianMatrix& h) {
  nlohmann::ordered_json doc;
  doc["v"] = h.size();
  auto entries = nlohmann::ordered_json::array();
  for (int r = 0; r < h.size(); ++r)
    for (int c = 0; c < h.size(); ++c) {
      const Complex val = h(r, c);
      if (val == Complex(0.0, 0.0)) continue;
      entries.push_back({r, c, val.real(), val.imag()});
    }
  doc["entries"] = std::move(entries);
  doc["zero_threshold"] = h.zero_threshold();
  return doc;
}

}  // namespace mxc
