// Copyright 2026 The advcert Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON interchange: function specs, {bitstring: value} tables and
// certificate files. Bitstring keys put coordinate 1 first.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "advcert/config.hpp"
#include "advcert/core.hpp"
#include "advcert/pipeline.hpp"
#include "advcert/poly.hpp"

namespace advcert {

using Json = nlohmann::ordered_json;

inline constexpr int kCertificateSchemaVersion = 1;

inline Word parse_bitstring(const std::string& s, int q = 2) {
  Word w;
  for (char ch : s) {
    if (ch < '0' || ch - '0' >= q || ch > '9') throw ParseError("invalid symbol '" + std::string(1, ch) + "' in string \"" + s + "\"");
    w.push_back(ch - '0');
  }
  if (w.empty()) throw ParseError("empty input string");
  return w;
}

struct FunctionSpec {
  std::string kind;  // or, and, parity, majority, symmetric, truth_table, promise
  int n = 0;
  std::vector<int> values;         // symmetric: value per Hamming weight, -1 = undefined
  std::vector<std::string> ones;   // promise: X
  std::vector<std::string> zeros;  // promise: Y
  std::string table;               // truth_table: 2^n chars from {0,1,*}

  PartialFunction build(const Limits& limits = {}) const {
    if (kind == "promise") return build_promise(limits);
    if (n < 1) throw std::invalid_argument("function spec needs n >= 1");
    InputDomain dom(n, 2, limits);
    if (kind == "truth_table" && table.size() != dom.size()) {
      throw std::invalid_argument("truth table must have 2^n = " + std::to_string(dom.size()) + " entries");
    }
    if (kind == "symmetric" && values.size() != static_cast<std::size_t>(n + 1)) {
      throw std::invalid_argument("symmetric spec needs n + 1 values");
    }
    std::vector<Word> xs, ys;
    for (std::uint64_t r = 0; r < dom.size(); ++r) {
      Word x = dom.word(r);
      int w = 0;
      for (int b : x) w += b;
      int v;
      if (kind == "or") v = w > 0;
      else if (kind == "and") v = w == n;
      else if (kind == "parity") v = w % 2;
      else if (kind == "majority") v = 2 * w > n;
      else if (kind == "symmetric") v = values[static_cast<std::size_t>(w)];
      else if (kind == "truth_table") {
        char ch = table[r];
        if (ch != '0' && ch != '1' && ch != '*') throw ParseError("truth table entries must be 0, 1 or *");
        v = ch == '*' ? -1 : ch - '0';
      } else {
        throw std::invalid_argument("unknown function kind '" + kind + "'");
      }
      if (v == 1) xs.push_back(std::move(x));
      else if (v == 0) ys.push_back(std::move(x));
      else if (v != -1) throw std::invalid_argument("function values must be 0, 1 or -1 (undefined)");
    }
    return PartialFunction(dom, std::move(xs), std::move(ys));
  }

  std::string describe() const {
    if (kind == "promise") {
      std::string s = "promise(X=";
      for (std::size_t i = 0; i < ones.size(); ++i) s += (i ? "," : "") + ones[i];
      s += ";Y=";
      for (std::size_t i = 0; i < zeros.size(); ++i) s += (i ? "," : "") + zeros[i];
      return s + ")";
    }
    if (kind == "truth_table") return "truth_table(" + table + ")";
    if (kind == "symmetric") {
      std::string s = "symmetric(n=" + std::to_string(n) + ";";
      for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + (values[i] < 0 ? std::string("*") : std::to_string(values[i]));
      return s + ")";
    }
    return kind + "(n=" + std::to_string(n) + ")";
  }

  friend bool operator==(const FunctionSpec&, const FunctionSpec&) = default;

 private:
  PartialFunction build_promise(const Limits& limits) const {
    std::vector<Word> xs, ys;
    for (const auto& s : ones) xs.push_back(parse_bitstring(s));
    for (const auto& s : zeros) ys.push_back(parse_bitstring(s));
    int len = n;
    for (const auto* set : {&xs, &ys})
      for (const auto& w : *set) {
        if (len == 0) len = static_cast<int>(w.size());
        if (static_cast<int>(w.size()) != len) throw ParseError("promise strings have different lengths");
      }
    if (len == 0) throw ParseError("promise spec lists no strings");
    return PartialFunction(InputDomain(len, 2, limits), std::move(xs), std::move(ys));
  }
};

inline void to_json(Json& j, const FunctionSpec& s) {
  j = Json{{"kind", s.kind}, {"n", s.n}};
  if (s.kind == "symmetric") j["values"] = s.values;
  if (s.kind == "promise") {
    j["X"] = s.ones;
    j["Y"] = s.zeros;
  }
  if (s.kind == "truth_table") j["table"] = s.table;
}

inline void from_json(const Json& j, FunctionSpec& s) {
  s = FunctionSpec{};
  j.at("kind").get_to(s.kind);
  if (j.contains("n")) j.at("n").get_to(s.n);
  if (j.contains("values")) j.at("values").get_to(s.values);
  if (j.contains("X")) j.at("X").get_to(s.ones);
  if (j.contains("Y")) j.at("Y").get_to(s.zeros);
  if (j.contains("table")) j.at("table").get_to(s.table);
}

// Parses JSON text, turning syntax errors into ParseError with a line number.
inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(origin + ":" + std::to_string(line) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// {bitstring: value} -> (domain n, entries)
inline std::vector<std::pair<Word, double>> table_entries(const Json& j, const std::string& origin, int& n) {
  if (!j.is_object()) throw ParseError(origin + ": expected an object mapping bitstrings to numbers");
  std::vector<std::pair<Word, double>> out;
  n = 0;
  for (const auto& [key, val] : j.items()) {
    Word w = parse_bitstring(key);
    if (n == 0) n = static_cast<int>(w.size());
    if (static_cast<int>(w.size()) != n) throw ParseError(origin + ": key \"" + key + "\" has the wrong length");
    if (!val.is_number()) throw ParseError(origin + ": value at \"" + key + "\" is not a number");
    out.emplace_back(std::move(w), val.get<double>());
  }
  if (out.empty()) throw ParseError(origin + ": table is empty");
  return out;
}

inline Measure measure_from_json(const Json& j, const std::string& origin, int& n, double norm_tol = 1e-9) {
  auto entries = table_entries(j, origin, n);
  std::vector<Word> support;
  std::vector<double> weights;
  for (auto& [w, v] : entries) {
    if (v < 0) throw ParseError(origin + ": negative weight at " + format_word(w));
    support.push_back(std::move(w));
    weights.push_back(v);
  }
  Measure mu(std::move(support), std::move(weights));
  if (std::abs(mu.total() - 1.0) > norm_tol) {
    throw ParseError(origin + ": weights sum to " + std::to_string(mu.total()) + ", expected 1");
  }
  return mu;
}

inline Json measure_to_json(const Measure& mu) {
  Json j = Json::object();
  for (std::size_t i = 0; i < mu.size(); ++i) j[format_word(mu.support()[i])] = mu.weights()[i];
  return j;
}

inline Json dual_to_json(const DualPolynomial& phi) {
  Json j = Json::object();
  for (std::uint64_t r = 0; r < phi.domain.size(); ++r) j[format_word(phi.domain.word(r))] = phi.values[r];
  return j;
}

inline DualPolynomial dual_from_json(const Json& j, const std::string& origin, int degree) {
  int n = 0;
  auto entries = table_entries(j, origin, n);
  InputDomain dom(n, 2);
  std::vector<double> v(dom.size(), 0.0);
  for (const auto& [w, x] : entries) v[dom.rank(w)] = x;
  return DualPolynomial(dom, std::move(v), degree);
}

inline Json config_to_json(const Config& c, int m) {
  return Json{{"tolerances",
               {{"feasibility", c.tol.feasibility},
                {"duality_gap", c.tol.duality_gap},
                {"dual_validity", c.tol.dual_validity},
                {"gram", c.tol.gram},
                {"projector", c.tol.projector},
                {"rank", c.tol.rank},
                {"norm", c.tol.norm},
                {"isometry", c.tol.isometry},
                {"entrywise", c.tol.entrywise},
                {"zero", c.tol.zero}}},
              {"dual_threshold", c.dual_threshold},
              {"eps", c.eps},
              {"seed", c.seed},
              {"m", m}};
}

inline Config config_from_json(const Json& j) {
  Config c;
  const Json& t = j.at("tolerances");
  t.at("feasibility").get_to(c.tol.feasibility);
  t.at("duality_gap").get_to(c.tol.duality_gap);
  t.at("dual_validity").get_to(c.tol.dual_validity);
  t.at("gram").get_to(c.tol.gram);
  t.at("projector").get_to(c.tol.projector);
  t.at("rank").get_to(c.tol.rank);
  t.at("norm").get_to(c.tol.norm);
  t.at("isometry").get_to(c.tol.isometry);
  t.at("entrywise").get_to(c.tol.entrywise);
  t.at("zero").get_to(c.tol.zero);
  j.at("dual_threshold").get_to(c.dual_threshold);
  j.at("eps").get_to(c.eps);
  j.at("seed").get_to(c.seed);
  return c;
}

inline void to_json(Json& j, const LedgerEntry& e) {
  j = Json{{"stage", e.stage}, {"name", e.name}, {"value", e.value}, {"tolerance", e.tolerance}, {"pass", e.pass}};
  if (!e.note.empty()) j["note"] = e.note;
}

inline void from_json(const Json& j, LedgerEntry& e) {
  j.at("stage").get_to(e.stage);
  j.at("name").get_to(e.name);
  j.at("value").get_to(e.value);
  j.at("tolerance").get_to(e.tolerance);
  j.at("pass").get_to(e.pass);
  e.note = j.value("note", std::string{});
}

inline void to_json(Json& j, const BoundValue& b) {
  j = Json{{"s_mu", b.s_mu},         {"s_nu", b.s_nu}, {"correlation", b.correlation}, {"tau", b.tau},
           {"norm", b.norm},         {"max_masked_norm", b.max_masked}, {"bound", b.bound}};
}

inline void from_json(const Json& j, BoundValue& b) {
  j.at("s_mu").get_to(b.s_mu);
  j.at("s_nu").get_to(b.s_nu);
  j.at("correlation").get_to(b.correlation);
  j.at("tau").get_to(b.tau);
  j.at("norm").get_to(b.norm);
  j.at("max_masked_norm").get_to(b.max_masked);
  j.at("bound").get_to(b.bound);
}

namespace detail {

template <class T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
  else j[key] = nullptr;
}

template <class T>
void get_optional(const Json& j, const char* key, std::optional<T>& v) {
  if (!j.contains(key) || j.at(key).is_null()) v.reset();
  else v = j.at(key).get<T>();
}

}  // namespace detail

inline void to_json(Json& j, const Certificate& c) {
  j = Json::object();
  j["function"] = c.function;
  j["n"] = c.n;
  j["d"] = c.d;
  j["eps"] = c.eps;
  j["total"] = c.total;
  j["epsilon_star"] = c.epsilon_star;
  j["dual_digest"] = c.dual_digest;
  j["dual_objective"] = c.dual_objective;
  j["m"] = c.m;
  detail::put_optional(j, "negative_mass", c.negative_mass);
  detail::put_optional(j, "mass_gap", c.mass_gap);
  detail::put_optional(j, "norm", c.norm);
  detail::put_optional(j, "correlation", c.correlation);
  j["masked_norms"] = c.masked_norms;
  detail::put_optional(j, "bound", c.bound);
  detail::put_optional(j, "ideal_bound", c.ideal_bound);
  detail::put_optional(j, "correlation_gap", c.correlation_gap);
  detail::put_optional(j, "correlation_gap_eps_1/8", c.correlation_gap_eighth);
  detail::put_optional(j, "restricted_norm", c.restricted_norm);
  detail::put_optional(j, "restriction_factor", c.restriction_factor);
  j["restricted_masked_norms"] = c.restricted_masked_norms;
  j["ledger"] = c.ledger;
  j["notes"] = c.notes;
  j["valid"] = c.valid;
  j["failed_stage"] = c.failed_stage;
}

inline void from_json(const Json& j, Certificate& c) {
  c = Certificate{};
  j.at("function").get_to(c.function);
  j.at("n").get_to(c.n);
  j.at("d").get_to(c.d);
  j.at("eps").get_to(c.eps);
  j.at("total").get_to(c.total);
  j.at("epsilon_star").get_to(c.epsilon_star);
  j.at("dual_digest").get_to(c.dual_digest);
  j.at("dual_objective").get_to(c.dual_objective);
  j.at("m").get_to(c.m);
  detail::get_optional(j, "negative_mass", c.negative_mass);
  detail::get_optional(j, "mass_gap", c.mass_gap);
  detail::get_optional(j, "norm", c.norm);
  detail::get_optional(j, "correlation", c.correlation);
  j.at("masked_norms").get_to(c.masked_norms);
  detail::get_optional(j, "bound", c.bound);
  detail::get_optional(j, "ideal_bound", c.ideal_bound);
  detail::get_optional(j, "correlation_gap", c.correlation_gap);
  detail::get_optional(j, "correlation_gap_eps_1/8", c.correlation_gap_eighth);
  detail::get_optional(j, "restricted_norm", c.restricted_norm);
  detail::get_optional(j, "restriction_factor", c.restriction_factor);
  j.at("restricted_masked_norms").get_to(c.restricted_masked_norms);
  j.at("ledger").get_to(c.ledger);
  j.at("notes").get_to(c.notes);
  j.at("valid").get_to(c.valid);
  j.at("failed_stage").get_to(c.failed_stage);
}

// The complete certificate file: schema header, inputs, configuration and
// the certificate itself.
struct CertificateFile {
  int schema_version = kCertificateSchemaVersion;
  FunctionSpec spec;
  Config config;
  Certificate certificate;
};

inline Json certificate_file_to_json(const CertificateFile& f) {
  return Json{{"schema", "advcert.certificate"},
              {"schema_version", f.schema_version},
              {"function_spec", f.spec},
              {"config", config_to_json(f.config, f.certificate.m)},
              {"certificate", f.certificate}};
}

inline CertificateFile certificate_file_from_json(const Json& j) {
  if (j.value("schema", std::string{}) != "advcert.certificate") throw ParseError("not a certificate file");
  CertificateFile f;
  j.at("schema_version").get_to(f.schema_version);
  if (f.schema_version != kCertificateSchemaVersion) {
    throw ParseError("unsupported certificate schema version " + std::to_string(f.schema_version));
  }
  j.at("function_spec").get_to(f.spec);
  f.config = config_from_json(j.at("config"));
  j.at("certificate").get_to(f.certificate);
  return f;
}

}  // namespace advcert
