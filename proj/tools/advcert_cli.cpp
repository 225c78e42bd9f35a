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

// advcert: approximate degree, dual polynomials and adversary certificates
// for small Boolean functions.
//
//   advcert degree    --fn or --n 2 --d 1
//   advcert certify   --fn parity --n 5 --d 4 --json cert.json
//   advcert checkgram --mu even.json --nu odd.json --m 1 --emit-dual phi.json
//   advcert dual-to-adv --dual phi.json --d 2
//
// Exit status: 0 valid, 1 error, 2 invalid certificate or failed check.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "advcert/advcert.hpp"

namespace {

using advcert::Json;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInvalid = 2;

struct SpecArgs {
  std::string fn;
  int n = 0;
  std::vector<std::string> promise;
  std::string table;
  std::string values;

  advcert::FunctionSpec spec() const {
    advcert::FunctionSpec s;
    const int given = !fn.empty() + !promise.empty() + !table.empty();
    if (given != 1) throw std::invalid_argument("give exactly one of --fn, --promise, --table");
    if (!promise.empty()) {
      s.kind = "promise";
      for (const auto& item : promise) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--promise expects X=... and Y=... (got '" + item + "')");
        std::string side = item.substr(0, eq);
        auto& out = side == "X" ? s.ones : side == "Y" ? s.zeros : throw std::invalid_argument("--promise side must be X or Y");
        std::stringstream ss(item.substr(eq + 1));
        std::string tok;
        while (std::getline(ss, tok, ','))
          if (!tok.empty()) out.push_back(tok);
      }
      return s;
    }
    if (!table.empty()) {
      s.kind = "truth_table";
      int len = 0;
      while ((std::size_t{1} << len) < table.size()) ++len;
      if ((std::size_t{1} << len) != table.size()) throw std::invalid_argument("--table length must be a power of two");
      s.n = len;
      s.table = table;
      return s;
    }
    s.kind = fn;
    s.n = n;
    if (fn == "symmetric") {
      std::stringstream ss(values);
      std::string tok;
      while (std::getline(ss, tok, ',')) s.values.push_back(tok == "*" ? -1 : std::stoi(tok));
    }
    return s;
  }
};

void add_spec_options(CLI::App* cmd, SpecArgs& a) {
  cmd->add_option("--fn", a.fn, "built-in family")
      ->check(CLI::IsMember({"or", "and", "parity", "majority", "symmetric"}));
  cmd->add_option("--n", a.n, "number of input bits");
  cmd->add_option("--values", a.values, "symmetric: comma-separated value per Hamming weight, * = undefined");
  cmd->add_option("--promise", a.promise, "partial function, e.g. X=11,10 Y=00")->expected(1, -1);
  cmd->add_option("--table", a.table, "truth table of 2^n symbols from {0,1,*} in rank order");
}

void add_config_options(CLI::App* cmd, advcert::Config& c) {
  auto& t = c.tol;
  cmd->add_option("--tol-feasibility", t.feasibility)->capture_default_str();
  cmd->add_option("--tol-duality-gap", t.duality_gap)->capture_default_str();
  cmd->add_option("--tol-dual-validity", t.dual_validity)->capture_default_str();
  cmd->add_option("--tol-gram", t.gram)->capture_default_str();
  cmd->add_option("--tol-projector", t.projector)->capture_default_str();
  cmd->add_option("--tol-rank", t.rank)->capture_default_str();
  cmd->add_option("--tol-norm", t.norm)->capture_default_str();
  cmd->add_option("--tol-isometry", t.isometry)->capture_default_str();
  cmd->add_option("--tol-entrywise", t.entrywise)->capture_default_str();
  cmd->add_option("--tol-zero", t.zero)->capture_default_str();
  cmd->add_option("--threshold", c.dual_threshold, "dual objective threshold")->capture_default_str();
  cmd->add_option("--seed", c.seed, "seed for power-iteration starts")->capture_default_str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(const Json& j) {
  if (j.is_null()) return "n/a";
  return fmt("%.9f", j.get<double>());
}

std::string join(const Json& arr) {
  std::string s;
  for (std::size_t i = 0; i < arr.size(); ++i) s += (i ? ", " : "") + num(arr[i]);
  return "[" + s + "]";
}

// Writes the payload to `path` ("-" = stdout). Returns the stream the
// summary should go to.
std::ostream& emit(const Json& payload, const std::string& path) {
  if (path.empty()) return std::cout;
  std::string text = payload.dump(2) + "\n";
  if (path == "-") {
    std::cout << text << std::flush;
    return std::cerr;
  }
  advcert::write_file(path, text);
  return std::cout;
}

Json read_json(const std::string& path) { return advcert::parse_json_text(advcert::read_file(path), path); }

// degree ------------------------------------------------------------------

struct DegreeArgs {
  SpecArgs spec;
  int d = 0;
  std::string json;
  std::string emit_dual;
  advcert::Config cfg;
};

int run_degree(const DegreeArgs& a) {
  auto spec = a.spec.spec();
  auto f = spec.build(a.cfg.limits);
  auto r = f.is_total() ? advcert::solve_lp_total(f, a.d, a.cfg.tol) : advcert::solve_lp_partial(f, a.d, a.cfg.tol);
  Json payload{{"function", spec.describe()},
               {"n", f.domain().n()},
               {"d", a.d},
               {"total", f.is_total()},
               {"epsilon_star", r.epsilon_star},
               {"dual_objective", r.dual ? Json(r.dual_objective) : Json(nullptr)},
               {"duality_gap", r.gap},
               {"clamped", r.clamped},
               {"note", r.note}};
  if (!a.emit_dual.empty()) {
    if (!r.dual) throw advcert::Error("dual-extraction: no dual witness (" + r.note + ")");
    advcert::write_file(a.emit_dual, advcert::dual_to_json(*r.dual).dump(2) + "\n");
    payload["dual_path"] = a.emit_dual;
    payload["dual_digest"] = advcert::dual_digest(*r.dual);
  }
  std::ostream& out = emit(payload, a.json);
  out << "epsilon_star = " << num(payload["epsilon_star"]) << "\n";
  if (!payload["note"].get<std::string>().empty()) out << "note: " << payload["note"].get<std::string>() << "\n";
  if (payload.contains("dual_path")) out << "dual written to " << payload["dual_path"].get<std::string>() << "\n";
  return kOk;
}

// certify -----------------------------------------------------------------

struct CertifyArgs {
  SpecArgs spec;
  int d = 0;
  std::string json;
  std::string emit_dual;
  advcert::Config cfg;
};

void print_certificate(std::ostream& out, const Json& file) {
  const Json& c = file["certificate"];
  out << "function        " << c["function"].get<std::string>() << "\n";
  out << "n = " << c["n"].get<int>() << ", d = " << c["d"].get<int>() << ", m = " << c["m"].get<int>()
      << ", eps = " << c["eps"].get<double>() << "\n";
  out << "epsilon_star    " << num(c["epsilon_star"]) << "\n";
  out << "dual objective  " << num(c["dual_objective"]) << "\n";
  out << "negative mass   " << num(c["negative_mass"]) << "\n";
  out << "mass gap        " << num(c["mass_gap"]) << "\n";
  out << "norm            " << num(c["norm"]) << "\n";
  out << "correlation     " << num(c["correlation"]) << "\n";
  out << "masked norms    " << join(c["masked_norms"]) << "\n";
  if (!c["bound"].is_null()) out << "bound           " << num(c["bound"]["bound"]) << "\n";
  if (!c["ideal_bound"].is_null()) out << "ideal bound     " << num(c["ideal_bound"]["bound"]) << "\n";
  out << "restricted norm " << num(c["restricted_norm"]) << " (factor " << num(c["restriction_factor"]) << ")\n";
  for (const auto& e : c["ledger"]) {
    if (e["pass"].get<bool>()) continue;
    out << "FAILED " << e["stage"].get<std::string>() << "/" << e["name"].get<std::string>() << " value "
        << num(e["value"]) << " tolerance " << num(e["tolerance"]);
    if (e.contains("note")) out << " (" << e["note"].get<std::string>() << ")";
    out << "\n";
  }
  for (const auto& note : c["notes"]) out << "note: " << note.get<std::string>() << "\n";
  if (c["valid"].get<bool>()) {
    out << "certificate: VALID\n";
  } else {
    out << "certificate: INVALID at stage " << c["failed_stage"].get<std::string>() << "\n";
  }
}

int run_certify(const CertifyArgs& a) {
  auto spec = a.spec.spec();
  auto f = spec.build(a.cfg.limits);
  advcert::CertificateFile file{advcert::kCertificateSchemaVersion, spec, a.cfg,
                                advcert::certify(f, a.d, a.cfg, spec.describe())};
  if (!a.emit_dual.empty()) {
    auto r = f.is_total() ? advcert::solve_lp_total(f, a.d, a.cfg.tol) : advcert::solve_lp_partial(f, a.d, a.cfg.tol);
    if (r.dual) advcert::write_file(a.emit_dual, advcert::dual_to_json(*r.dual).dump(2) + "\n");
  }
  Json payload = advcert::certificate_file_to_json(file);
  print_certificate(emit(payload, a.json), payload);
  return payload["certificate"]["valid"].get<bool>() ? kOk : kInvalid;
}

// checkgram ---------------------------------------------------------------

struct CheckGramArgs {
  std::string mu;
  std::string nu;
  int m = 1;
  std::string json;
  std::string emit_dual;
  advcert::Config cfg;
};

int run_checkgram(const CheckGramArgs& a) {
  int n_mu = 0, n_nu = 0;
  auto mu = advcert::measure_from_json(read_json(a.mu), a.mu, n_mu);
  auto nu = advcert::measure_from_json(read_json(a.nu), a.nu, n_nu);
  if (n_mu != n_nu) throw advcert::ParseError("distributions live on different input lengths");
  advcert::InputDomain dom(n_mu, 2, a.cfg.limits);
  auto rep = advcert::check_gram(dom, mu, nu, a.m, a.cfg);
  Json payload{{"n", n_mu},
               {"m", a.m},
               {"max_deviation", rep.max_deviation},
               {"tolerance", a.cfg.tol.gram},
               {"worst_pair", {rep.worst_left.to_string(), rep.worst_right.to_string()}},
               {"pass", rep.pass}};
  if (!a.emit_dual.empty() && rep.pass) {
    auto phi = advcert::dual_from_distributions(dom, mu, nu, a.m, a.cfg);
    auto f = advcert::distribution_function(dom, mu, nu);
    auto check = advcert::validate_dual(phi, phi.degree, a.cfg.tol.dual_validity);
    advcert::write_file(a.emit_dual, advcert::dual_to_json(phi).dump(2) + "\n");
    payload["dual"] = Json{{"path", a.emit_dual},
                           {"degree", phi.degree},
                           {"objective", advcert::partial_dual_objective(phi, f)},
                           {"valid", check.valid()},
                           {"digest", advcert::dual_digest(phi)}};
  }
  std::ostream& out = emit(payload, a.json);
  out << "gram check at m = " << a.m << ": " << (rep.pass ? "pass" : "FAIL") << " (max deviation "
      << fmt("%.3e", payload["max_deviation"].get<double>()) << " at " << payload["worst_pair"][0].get<std::string>()
      << ", " << payload["worst_pair"][1].get<std::string>() << ")\n";
  if (payload.contains("dual")) {
    const Json& d = payload["dual"];
    out << "dual of degree " << d["degree"].get<int>() << " written to " << d["path"].get<std::string>()
        << ", objective " << num(d["objective"]) << (d["valid"].get<bool>() ? "" : " (INVALID)") << "\n";
  }
  bool ok = rep.pass && (!payload.contains("dual") || payload["dual"]["valid"].get<bool>());
  return ok ? kOk : kInvalid;
}

// dual-to-adv -------------------------------------------------------------

struct DualToAdvArgs {
  std::string dual;
  int d = 0;
  int m = -1;
  SpecArgs spec;
  std::string json;
  advcert::Config cfg;
};

int run_dual_to_adv(const DualToAdvArgs& a) {
  auto phi = advcert::dual_from_json(read_json(a.dual), a.dual, a.d);
  std::optional<advcert::PartialFunction> f;
  if (!a.spec.fn.empty() || !a.spec.promise.empty() || !a.spec.table.empty()) {
    f = a.spec.spec().build(a.cfg.limits);
    if (f->domain().n() != phi.domain.n()) throw std::invalid_argument("function and dual have different n");
  }
  const bool partial = f && !f->is_total();
  auto split = partial ? advcert::split_partial(phi, *f, a.cfg) : f ? advcert::split_total(phi, *f, a.cfg)
                                                                    : advcert::split_total(phi, a.cfg);
  const int m = a.m >= 0 ? a.m : a.d / 2;
  Json payload{{"n", phi.domain.n()},
               {"d", a.d},
               {"m", m},
               {"dual_digest", advcert::dual_digest(phi)},
               {"scale", split.scale},
               {"negative_mass", split.negative_mass},
               {"mu", advcert::measure_to_json(split.mu)},
               {"nu", advcert::measure_to_json(split.nu)}};
  if (f) payload["dual_objective"] = split.objective;
  auto adv = advcert::build_adversary(phi.domain, split.mu, split.nu, m, a.cfg);
  Json masked = Json::array(), mask_ok = Json::array();
  for (const auto& mn : adv.masked) {
    masked.push_back(mn.norm);
    mask_ok.push_back(mn.mask_bound_ok);
  }
  payload["norm"] = adv.norm;
  payload["correlation"] = adv.correlation;
  payload["masked_norms"] = masked;
  payload["mask_within_substitute"] = mask_ok;
  payload["checks_pass"] = adv.checks_pass(a.cfg.tol.norm);
  if (f) {
    auto rr = advcert::restrict_and_bound(adv, *f, a.cfg);
    payload["restricted_norm"] = rr.norm;
    payload["restriction_factor"] = rr.factor;
  }
  std::ostream& out = emit(payload, a.json);
  out << "split: |supp mu| = " << split.mu.size() << ", |supp nu| = " << split.nu.size() << ", scale "
      << num(payload["scale"]) << "\n";
  out << "m = " << m << ", norm " << num(payload["norm"]) << ", correlation " << num(payload["correlation"]) << "\n";
  out << "masked norms " << join(payload["masked_norms"]) << "\n";
  if (payload.contains("restricted_norm")) {
    out << "restricted norm " << num(payload["restricted_norm"]) << " (factor " << num(payload["restriction_factor"])
        << ")\n";
  }
  out << "checks: " << (payload["checks_pass"].get<bool>() ? "pass" : "FAIL") << "\n";
  return payload["checks_pass"].get<bool>() ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate degree, dual polynomials and adversary certificates"};
  app.require_subcommand(1);

  DegreeArgs degree;
  auto* c_degree = app.add_subcommand("degree", "solve the approximation LP and print epsilon*");
  add_spec_options(c_degree, degree.spec);
  c_degree->add_option("--d", degree.d, "degree")->required();
  c_degree->add_option("--json", degree.json, "write the JSON payload to PATH, or - for stdout");
  c_degree->add_option("--emit-dual", degree.emit_dual, "write the dual polynomial as {bitstring: value}");
  add_config_options(c_degree, degree.cfg);

  CertifyArgs certify;
  auto* c_certify = app.add_subcommand("certify", "run the full pipeline and emit a certificate");
  add_spec_options(c_certify, certify.spec);
  c_certify->add_option("--d", certify.d, "degree")->required();
  c_certify->add_option("--eps", certify.cfg.eps, "approximation error, at most 1/8")->capture_default_str();
  c_certify->add_option("--json", certify.json, "write the certificate to PATH, or - for stdout");
  c_certify->add_option("--emit-dual", certify.emit_dual, "also write the LP dual polynomial");
  add_config_options(c_certify, certify.cfg);

  CheckGramArgs gram;
  auto* c_gram = app.add_subcommand("checkgram", "compare the Gram matrices of two distributions");
  c_gram->add_option("--mu", gram.mu, "distribution file {bitstring: weight}")->required();
  c_gram->add_option("--nu", gram.nu, "distribution file {bitstring: weight}")->required();
  c_gram->add_option("--m", gram.m, "level")->capture_default_str();
  c_gram->add_option("--json", gram.json, "write the JSON payload to PATH, or - for stdout");
  c_gram->add_option("--emit-dual", gram.emit_dual, "build the degree-2m dual mu/2 - nu/2 and write it");
  add_config_options(c_gram, gram.cfg);

  DualToAdvArgs d2a;
  auto* c_d2a = app.add_subcommand("dual-to-adv", "split a dual polynomial and build its adversary matrix");
  c_d2a->add_option("--dual", d2a.dual, "dual polynomial file {bitstring: value}")->required();
  c_d2a->add_option("--d", d2a.d, "degree the dual is claimed to have")->required();
  c_d2a->add_option("--m", d2a.m, "adversary level, default floor(d/2)");
  add_spec_options(c_d2a, d2a.spec);
  c_d2a->add_option("--json", d2a.json, "write the JSON payload to PATH, or - for stdout");
  add_config_options(c_d2a, d2a.cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*c_degree) return run_degree(degree);
    if (*c_certify) return run_certify(certify);
    if (*c_gram) return run_checkgram(gram);
    if (*c_d2a) return run_dual_to_adv(d2a);
  } catch (const std::exception& e) {
    std::cerr << "advcert: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
