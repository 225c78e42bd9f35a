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

// Conversions between dual polynomials and pairs of distributions, and the
// end-to-end certification driver.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "advcert/adversary.hpp"
#include "advcert/config.hpp"
#include "advcert/core.hpp"
#include "advcert/poly.hpp"

namespace advcert {

struct SplitResult {
  Measure mu;  // on X~ = {phi > 0}
  Measure nu;  // on Y~ = {phi < 0}
  double scale = 0.0;       // mu = scale * phi
  double negative_mass = 0.0;  // M = sum_x phi^-(x)
  double objective = 0.0;   // dual objective of phi
  DualReport report;
};

namespace detail {

inline void split_by_sign(const DualPolynomial& phi, double scale, double zero_tol, SplitResult& out) {
  std::vector<Word> xs, ys;
  std::vector<double> wx, wy;
  for (std::uint64_t r = 0; r < phi.domain.size(); ++r) {
    double v = phi.values[r];
    // phi(x) = 0 belongs to X~ with zero mass and is pruned.
    if (v > zero_tol) {
      xs.push_back(phi.domain.word(r));
      wx.push_back(scale * v);
    } else if (v < -zero_tol) {
      ys.push_back(phi.domain.word(r));
      wy.push_back(-scale * v);
    }
  }
  out.scale = scale;
  out.mu = Measure(std::move(xs), std::move(wx));
  out.nu = Measure(std::move(ys), std::move(wy));
}

inline double negative_mass(const DualPolynomial& phi) {
  double s = 0.0;
  for (double v : phi.values) s += std::max(0.0, -v);
  return s;
}

inline std::string describe(const DualReport& rep) {
  return "character violation " + std::to_string(rep.character_violation) + " at S = " +
         format_index_set(rep.worst_character) + ", assignment violation " +
         std::to_string(rep.assignment_violation) + " at " + rep.worst_assignment.to_string();
}

}  // namespace detail

// mu = 2 phi on X~, nu = -2 phi on Y~ for a total dual polynomial.
inline SplitResult split_total(const DualPolynomial& phi, const Config& cfg = {}) {
  SplitResult out;
  out.report = validate_dual(phi, phi.degree, cfg.tol.dual_validity);
  if (!out.report.valid()) throw InvalidDual("not a degree-" + std::to_string(phi.degree) + " dual: " + detail::describe(out.report));
  if (std::abs(out.report.l1_norm - 1.0) > cfg.tol.dual_validity) {
    throw InvalidDual("sum |phi| = " + std::to_string(out.report.l1_norm) + ", expected 1");
  }
  detail::split_by_sign(phi, 2.0, cfg.tol.zero, out);
  out.negative_mass = detail::negative_mass(phi);
  return out;
}

// As split_total, attaching the objective sum_x phi(x) f(x).
inline SplitResult split_total(const DualPolynomial& phi, const PartialFunction& f, const Config& cfg = {}) {
  SplitResult out = split_total(phi, cfg);
  out.objective = total_dual_objective(phi, f);
  return out;
}

// mu = phi / M on X~, nu = -phi / M on Y~ with M = sum phi^-.
inline SplitResult split_partial(const DualPolynomial& phi, const PartialFunction& f, const Config& cfg = {}) {
  SplitResult out;
  out.report = validate_dual(phi, phi.degree, cfg.tol.dual_validity);
  if (!out.report.valid()) throw InvalidDual("not a degree-" + std::to_string(phi.degree) + " dual: " + detail::describe(out.report));
  double norm = partial_normalization(phi, f);
  if (std::abs(norm - 1.0) > cfg.tol.dual_validity) {
    throw InvalidDual("partial normalization equals " + std::to_string(norm) + ", expected 1");
  }
  out.negative_mass = detail::negative_mass(phi);
  if (!(out.negative_mass > 0.0)) throw InvalidDual("phi has no negative part");
  out.objective = partial_dual_objective(phi, f);
  detail::split_by_sign(phi, 1.0 / out.negative_mass, cfg.tol.zero, out);
  return out;
}

// sum_{x in X} mu_x - sum_{y notin Y} nu_y
inline double mass_gap(const SplitResult& s, const PartialFunction& f) {
  double g = 0.0;
  for (std::size_t i = 0; i < s.mu.size(); ++i)
    if (f.in_ones(s.mu.support()[i])) g += s.mu.weights()[i];
  for (std::size_t i = 0; i < s.nu.size(); ++i)
    if (!f.in_zeros(s.nu.support()[i])) g -= s.nu.weights()[i];
  return g;
}

// Bounds implied by a dual objective of at least t: M <= 1 - t and a mass gap
// of at least t / (1 - t). For t = 1/3 these are 2/3 and 1/2.
inline double negative_mass_ceiling(double threshold) { return 1.0 - threshold; }
inline double mass_gap_floor(double threshold) { return threshold / (1.0 - threshold); }

struct CorrelationGap {
  double eps = 0.0;
  double s_mu = 0.0;
  double s_nu = 0.0;
  double gap = 0.0;          // s_mu - s_nu
  double lower_bound = 0.0;  // mass gap - 2 eps
  bool holds = false;
};

// 1 on X, 0 elsewhere.
inline std::vector<double> ideal_acceptance(const PartialFunction& f) {
  const auto& dom = f.domain();
  std::vector<double> p(dom.size(), 0.0);
  for (const auto& x : f.ones()) p[static_cast<std::size_t>(dom.rank(x))] = 1.0;
  return p;
}

// The admissible acceptance table minimizing s_mu - s_nu at error eps.
inline std::vector<double> worst_acceptance(const SplitResult& s, const PartialFunction& f, double eps) {
  const auto& dom = f.domain();
  std::vector<double> p(dom.size(), 0.0);
  for (std::uint64_t r = 0; r < dom.size(); ++r) {
    Word x = dom.word(r);
    if (f.in_ones(x)) {
      p[r] = 1.0 - eps;
    } else if (f.in_zeros(x)) {
      p[r] = eps;
    } else {
      p[r] = s.nu.weight_of(x) > s.mu.weight_of(x) ? 1.0 : 0.0;
    }
  }
  return p;
}

inline CorrelationGap correlation_gap(const SplitResult& s, const PartialFunction& f, std::span<const double> p,
                                      double eps, const Config& cfg = {}) {
  const auto& dom = f.domain();
  if (p.size() != dom.size()) throw std::invalid_argument("acceptance table must have q^n entries");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0, 1]");
  for (std::uint64_t r = 0; r < dom.size(); ++r) {
    Word x = dom.word(r);
    double v = p[r];
    if (!(v >= 0.0 && v <= 1.0)) throw PromiseViolation("p(" + format_word(x) + ") lies outside [0, 1]");
    if (f.in_ones(x) && v < 1.0 - eps) throw PromiseViolation("p(" + format_word(x) + ") < 1 - eps on X");
    if (f.in_zeros(x) && v > eps) throw PromiseViolation("p(" + format_word(x) + ") > eps on Y");
  }
  CorrelationGap g;
  g.eps = eps;
  for (std::size_t i = 0; i < s.mu.size(); ++i) g.s_mu += s.mu.weights()[i] * p[dom.rank(s.mu.support()[i])];
  for (std::size_t i = 0; i < s.nu.size(); ++i) g.s_nu += s.nu.weights()[i] * p[dom.rank(s.nu.support()[i])];
  g.gap = g.s_mu - g.s_nu;
  g.lower_bound = mass_gap(s, f) - 2.0 * eps;
  g.holds = g.gap >= g.lower_bound - cfg.tol.gram;
  return g;
}

// The partial function with X = supp mu and Y = supp nu.
inline PartialFunction distribution_function(const InputDomain& dom, const Measure& mu, const Measure& nu) {
  return PartialFunction(dom, mu.support(), nu.support());
}

// phi = mu/2 on X, -nu/2 on Y: a degree-2m dual polynomial whenever the
// marginals of mu and nu agree on every assignment of weight <= 2m.
inline DualPolynomial dual_from_distributions(const InputDomain& dom, const Measure& mu, const Measure& nu, int m,
                                              const Config& cfg = {}) {
  if (!dom.is_boolean()) throw BooleanOnly();
  if (m < 0) throw std::invalid_argument("level m must be non-negative");
  for (const auto& x : mu.support())
    if (nu.weight_of(x) > 0.0 || std::binary_search(nu.support().begin(), nu.support().end(), x)) {
      throw std::invalid_argument("supports of mu and nu intersect at " + format_word(x));
    }
  const int level = std::min(2 * m, dom.n());
  MarginalReport rep = check_marginals(dom, mu, nu, level, cfg);
  if (!rep.pass) throw MarginalMismatch(rep.worst.to_string(), rep.max_deviation);
  std::vector<double> phi(dom.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) phi[dom.rank(mu.support()[i])] = mu.weights()[i] / 2.0;
  for (std::size_t i = 0; i < nu.size(); ++i) phi[dom.rank(nu.support()[i])] = -nu.weights()[i] / 2.0;
  return DualPolynomial(dom, std::move(phi), level);
}

struct LedgerEntry {
  std::string stage;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

struct Certificate {
  std::string function;
  int n = 0;
  int d = 0;
  double eps = 0.0;
  bool total = false;
  double epsilon_star = 0.0;
  std::string dual_digest;  // empty when no dual was extracted
  double dual_objective = 0.0;
  int m = 0;
  std::optional<double> negative_mass;
  std::optional<double> mass_gap;
  std::optional<double> norm;
  std::optional<double> correlation;
  std::vector<double> masked_norms;
  std::optional<BoundValue> bound;        // at the worst admissible acceptance table
  std::optional<BoundValue> ideal_bound;  // at (s_mu, s_nu) = (1 - eps, eps)
  std::optional<double> correlation_gap;
  std::optional<double> correlation_gap_eighth;
  std::optional<double> restricted_norm;
  std::optional<double> restriction_factor;
  std::vector<double> restricted_masked_norms;
  std::vector<LedgerEntry> ledger;
  std::vector<std::string> notes;
  bool valid = false;
  std::string failed_stage;

  void record(std::string stage, std::string name, double value, double tolerance, bool pass,
              std::string note = {}) {
    ledger.push_back({std::move(stage), std::move(name), value, tolerance, pass, std::move(note)});
  }

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

// FNV-1a over the %.17g rendering of every table entry.
inline std::string dual_digest(const DualPolynomial& phi) {
  std::uint64_t h = 1469598103934665603ull;
  char buf[64];
  for (double v : phi.values) {
    int len = std::snprintf(buf, sizeof buf, "%.17g;", v);
    for (int i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Runs LP -> split -> Gram check -> adversary -> bounds -> restriction and
// records every verified identity in the ledger.
inline Certificate certify(const PartialFunction& f, int d, const Config& cfg = {}, std::string descriptor = {}) {
  const InputDomain& dom = f.domain();
  if (!dom.is_boolean()) throw BooleanOnly();
  if (d < 0 || d >= dom.n()) {
    throw std::invalid_argument("require d < n (got d = " + std::to_string(d) + ", n = " + std::to_string(dom.n()) + ")");
  }
  if (!(cfg.eps >= 0.0 && cfg.eps <= 0.125)) throw std::invalid_argument("eps must lie in [0, 1/8]");

  const Tolerances& tol = cfg.tol;
  const double threshold = cfg.dual_threshold;
  Certificate cert;
  cert.function = std::move(descriptor);
  cert.n = dom.n();
  cert.d = d;
  cert.eps = cfg.eps;
  cert.total = f.is_total();
  cert.m = d / 2;
  if (d % 2 == 1) {
    cert.notes.push_back("odd degree d = " + std::to_string(d) + ": the adversary level is m = floor(d/2) = " +
                         std::to_string(cert.m) + ", the nominal d/2 is not an integer level");
  }

  auto finish = [&cert]() {
    cert.valid = !cert.ledger.empty();
    for (const auto& e : cert.ledger) {
      if (!e.pass) {
        cert.valid = false;
        if (cert.failed_stage.empty()) cert.failed_stage = e.stage;
      }
    }
    return cert;
  };

  // Stage: approximation LP.
  ApproxResult lp = cert.total ? solve_lp_total(f, d, tol) : solve_lp_partial(f, d, tol);
  cert.epsilon_star = lp.epsilon_star;
  cert.record("lp", "duality_gap", lp.gap, tol.duality_gap, lp.gap <= tol.duality_gap);
  if (!lp.note.empty()) cert.notes.push_back(lp.note);
  if (!lp.dual) {
    cert.record("dual-extraction", "dual_available", 0.0, 0.0, false,
                "optimum is 0 and the clamp is active; there is no dual witness");
    return finish();
  }
  if (lp.epsilon_star > tol.feasibility) {
    cert.record("lp", "complementary_slackness", lp.slackness_residual, tol.feasibility, lp.complementary_slackness);
  }
  const DualPolynomial& phi = *lp.dual;
  cert.dual_digest = dual_digest(phi);
  cert.dual_objective = lp.dual_objective;

  // Stage: split into two distributions.
  SplitResult split;
  try {
    split = cert.total ? split_total(phi, f, cfg) : split_partial(phi, f, cfg);
  } catch (const InvalidDual& e) {
    DualReport rep = validate_dual(phi, phi.degree, tol.dual_validity);
    cert.record("dual-validity", "character_condition", rep.character_violation, tol.dual_validity, rep.character_ok);
    cert.record("dual-validity", "assignment_condition", rep.assignment_violation, tol.dual_validity, rep.assignment_ok);
    cert.record("dual-validity", "normalization", 0.0, tol.dual_validity, false, e.what());
    return finish();
  }
  cert.record("dual-validity", "character_condition", split.report.character_violation, tol.dual_validity,
              split.report.character_ok);
  cert.record("dual-validity", "assignment_condition", split.report.assignment_violation, tol.dual_validity,
              split.report.assignment_ok);
  cert.record("threshold", "dual_objective", split.objective, threshold, split.objective >= threshold - tol.gram,
              split.objective >= threshold - tol.gram ? "" : "dual objective is below the configured threshold");

  const double mu_dev = std::abs(split.mu.total() - 1.0);
  const double nu_dev = std::abs(split.nu.total() - 1.0);
  cert.record("split", "mu_normalization", mu_dev, tol.gram, mu_dev <= tol.gram);
  cert.record("split", "nu_normalization", nu_dev, tol.gram, nu_dev <= tol.gram);
  MarginalReport marg = check_marginals(dom, split.mu, split.nu, d, cfg);
  cert.record("split", "marginal_match", marg.max_deviation, tol.gram, marg.pass,
              marg.pass ? "" : "worst assignment " + marg.worst.to_string());
  cert.negative_mass = split.negative_mass;
  cert.mass_gap = mass_gap(split, f);
  cert.record("split", "negative_mass", split.negative_mass, negative_mass_ceiling(threshold),
              split.negative_mass <= negative_mass_ceiling(threshold) + tol.gram);
  cert.record("split", "mass_gap", *cert.mass_gap, mass_gap_floor(threshold),
              *cert.mass_gap >= mass_gap_floor(threshold) - tol.gram);

  // Correlation gaps at the configured eps and at eps = 1/8.
  auto p = worst_acceptance(split, f, cfg.eps);
  CorrelationGap gap = correlation_gap(split, f, p, cfg.eps, cfg);
  cert.correlation_gap = gap.gap;
  cert.record("bound", "correlation_gap", gap.gap, gap.lower_bound, gap.holds);
  CorrelationGap gap8 = correlation_gap(split, f, worst_acceptance(split, f, 0.125), 0.125, cfg);
  cert.correlation_gap_eighth = gap8.gap;
  const double eighth_floor = mass_gap_floor(threshold) - 0.25;
  cert.record("bound", "correlation_gap_eps_1/8", gap8.gap, eighth_floor, gap8.holds && gap8.gap >= eighth_floor - tol.gram);

  // Stage: adversary matrix.
  if (cert.m < 1) {
    cert.record("adversary", "adversary_level", cert.m, 1.0, false, "m = floor(d/2) = 0: no adversary stage");
    return finish();
  }
  GramReport gram = check_gram(dom, split.mu, split.nu, cert.m, cfg);
  cert.record("adversary", "gram_match", gram.max_deviation, tol.gram, gram.pass);
  if (!gram.pass) return finish();
  AdversaryMatrix adv = build_adversary(dom, split.mu, split.nu, cert.m, cfg);
  const double m = cert.m;
  cert.norm = adv.norm;
  cert.correlation = adv.correlation;
  cert.record("adversary", "norm", adv.norm, tol.norm, std::abs(adv.norm - m) <= tol.norm);
  cert.record("adversary", "correlation", adv.correlation, tol.norm, std::abs(adv.correlation - m) <= tol.norm);
  cert.record("adversary", "top_singular_vectors", adv.top_vector_residual, tol.norm, adv.top_vector_residual <= tol.norm);
  cert.record("adversary", "isometry_domain", adv.isometry.domain_residual, tol.isometry,
              adv.isometry.domain_residual <= tol.isometry);
  cert.record("adversary", "isometry_range", adv.isometry.range_residual, tol.isometry,
              adv.isometry.range_residual <= tol.isometry);
  for (const auto& mn : adv.masked) {
    const std::string j = std::to_string(mn.coordinate + 1);
    cert.masked_norms.push_back(mn.norm);
    cert.record("adversary", "masked_norm_" + j, mn.norm, tol.norm, mn.norm <= adv.mask_bound() + tol.norm);
    cert.record("adversary", "substitute_norm_" + j, mn.substitute_norm, tol.norm, mn.substitute_norm <= 1.0 + tol.norm);
    cert.record("adversary", "substitute_agrees_off_mask_" + j, mn.substitute_residual, tol.entrywise,
                mn.substitute_residual <= tol.entrywise);
    cert.record("adversary", "mask_within_substitute_" + j, mn.norm, tol.norm, mn.mask_bound_ok);
  }

  // Distributional bound.
  cert.bound = distributional_bound(adv, gap.s_mu, gap.s_nu);
  cert.ideal_bound = distributional_bound(adv, 1.0 - cfg.eps, cfg.eps);
  cert.record("bound", "distributional_bound", cert.bound->bound, 0.0, cert.bound->bound > 0.0);

  // Worst-case bound on X x Y.
  RestrictionReport rr = restrict_and_bound(adv, f, cfg);
  cert.restricted_norm = rr.norm;
  cert.restriction_factor = rr.factor;
  cert.restricted_masked_norms = rr.masked_norms;
  cert.record("restriction", "chain_lower_bound", rr.norm, rr.chain_lower, rr.chain_ok);
  cert.record("restriction", "quarter_factor", rr.factor, 0.25, rr.quarter_applicable && rr.quarter_ok,
              rr.quarter_applicable ? "" : "mass gap below 1/2, factor-1/4 chain does not apply");
  cert.record("restriction", "denominator", rr.denominator, 2.0, rr.denominator_ok);
  cert.record("restriction", "masks_inherited", rr.masked_norms.empty() ? 0.0 : *std::max_element(rr.masked_norms.begin(), rr.masked_norms.end()),
              tol.norm, rr.masks_inherited);
  return finish();
}

}  // namespace advcert
