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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "advcert/advcert.hpp"
#include "oracles.hpp"

#ifndef ADVCERT_CLI
#error "ADVCERT_CLI must name the command-line binary"
#endif

using namespace advcert;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  int checks = 0;

  void expect(bool cond, const std::string& what) {
    ++checks;
    if (!cond && ok) {
      ok = false;
      detail << "first failure: " << what;
    }
  }
};

std::string str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int weight(const Word& w) { return std::accumulate(w.begin(), w.end(), 0); }

std::vector<Word> residue_class(const InputDomain& dom, int r) {
  std::vector<Word> out;
  for (const auto& w : dom.all_words())
    if (weight(w) % dom.q() == r) out.push_back(w);
  return out;
}

Measure random_measure(const InputDomain& dom, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<Word> support;
  std::vector<double> w;
  for (const auto& x : dom.all_words()) {
    if (rng() % 3 == 0) continue;
    support.push_back(x);
    w.push_back(u(rng));
  }
  if (support.empty()) {
    support.push_back(dom.word(0));
    w.push_back(1.0);
  }
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return Measure(support, w);
}

double residual(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

// 1 ------------------------------------------------------------------------
void parity_family(Outcome& o) {
  for (int n = 3; n <= 7; ++n) {
    InputDomain dom(n, 2);
    const int m = (n - 1) / 2;
    auto adv = build_adversary(dom, Measure::uniform(residue_class(dom, 0)), Measure::uniform(residue_class(dom, 1)), m);
    const std::string tag = "n=" + std::to_string(n) + " ";
    o.expect(std::abs(adv.norm - m) <= 1e-7, tag + "norm " + str(adv.norm));
    o.expect(std::abs(adv.correlation - m) <= 1e-7, tag + "correlation " + str(adv.correlation));
    o.expect(adv.max_masked_norm() <= 1.0 + 1e-7, tag + "masked norm " + str(adv.max_masked_norm()));
  }
  o.detail << "n = 3..7, norm = correlation = floor((n-1)/2), masked norms <= 1";
}

// 2 ------------------------------------------------------------------------
void lp_duality(Outcome& o) {
  int instances = 0;
  for (int n = 1; n <= 3; ++n) {
    InputDomain dom(n, 2);
    for (unsigned bits = 0; bits < (1u << dom.size()); ++bits) {
      std::vector<double> t(dom.size());
      for (std::size_t r = 0; r < dom.size(); ++r) t[r] = (bits >> r) & 1u;
      for (int d = 0; d < n; ++d) {
        auto r = solve_lp_total(dom, t, d);
        double oracle_value = oracle::total_approx_error(t, n, d);
        const std::string tag = "n=" + std::to_string(n) + " f=" + std::to_string(bits) + " d=" + std::to_string(d);
        o.expect(std::abs(r.epsilon_star - r.dual_objective) <= 1e-7, tag + " duality gap " + str(r.gap));
        o.expect(std::abs(r.epsilon_star - oracle_value) <= 1e-7, tag + " oracle " + str(oracle_value));
        o.expect(r.dual && validate_dual(*r.dual, d).valid(), tag + " dual invalid");
        ++instances;
      }
    }
  }
  InputDomain sq(2, 2);
  double or2 = solve_lp_total(sq, std::vector<double>{0, 1, 1, 1}, 1).epsilon_star;
  o.expect(std::abs(or2 - 0.25) <= 1e-7, "OR_2 " + str(or2));
  for (int n = 2; n <= 6; ++n) {
    InputDomain dom(n, 2);
    std::vector<double> t(dom.size());
    for (std::uint64_t r = 0; r < dom.size(); ++r) t[r] = weight(dom.word(r)) % 2;
    double e = solve_lp_total(dom, t, n - 1).epsilon_star;
    o.expect(std::abs(e - 0.5) <= 1e-7, "PARITY_" + std::to_string(n) + " " + str(e));
  }
  o.detail << instances << " (f, d) pairs against vertex enumeration; OR_2 = 0.25; PARITY_n = 0.5 for n = 2..6";
}

// 3 ------------------------------------------------------------------------
void dual_equivalence(Outcome& o) {
  std::mt19937 rng(2024);
  std::normal_distribution<double> g;
  int valid = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const int d = static_cast<int>(rng() % static_cast<unsigned>(n));
    InputDomain dom(n, 2);
    std::vector<double> v(dom.size());
    for (auto& e : v) e = g(rng);
    if (trial % 2 == 0) {
      for (const auto& s : subsets_up_to(n, d)) {
        double c = 0.0;
        for (std::uint64_t r = 0; r < dom.size(); ++r) c += v[r] * chi(dom, s, dom.word(r));
        c /= static_cast<double>(dom.size());
        for (std::uint64_t r = 0; r < dom.size(); ++r) v[r] -= c * chi(dom, s, dom.word(r));
      }
    }
    double l1 = 0.0;
    for (double e : v) l1 += std::abs(e);
    if (l1 == 0.0) continue;
    for (auto& e : v) e /= l1;
    auto rep = validate_dual(DualPolynomial(dom, v, d), d);
    o.expect(rep.verdicts_agree(), "trial " + std::to_string(trial) + " verdicts differ");
    o.expect(rep.basis_change_residual <= 1e-9, "trial " + std::to_string(trial) + " residual " + str(rep.basis_change_residual));
    valid += rep.valid();
  }
  o.detail << "200 tables, " << valid << " valid, verdicts agree, basis-change residual <= 1e-9";
}

// 4 ------------------------------------------------------------------------
void projector_identities(Outcome& o) {
  std::mt19937 rng(77);
  double worst = 0.0, worst_entry = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int q = inst % 2 == 0 ? 2 : 3;
    const int n = q == 2 ? 2 + inst % 3 : 2 + (inst / 2) % 2;
    InputDomain dom(n, q);
    auto vecs = build_vectors(dom, random_measure(dom, rng), n);
    for (int j = 0; j < n; ++j) {
      auto t = build_tower(vecs, j);
      worst = std::max(worst, residual(t.le.back(), Matrix::Identity(t.dim(), t.dim())));
      for (int k = 1; k <= n; ++k) {
        const Matrix& p = t.le[static_cast<std::size_t>(k)];
        const Matrix& below = t.le[static_cast<std::size_t>(k - 1)];
        const Matrix& pp = t.le_prime[static_cast<std::size_t>(k)];
        const Matrix& pp_below = t.le_prime[static_cast<std::size_t>(k - 1)];
        worst = std::max({worst, residual(p * below, below), residual(pp * pp_below, pp_below),
                          residual(pp * below, below), residual(p * pp, pp)});
        for (std::size_t x = 0; x < vecs.points.size(); ++x)
          for (std::size_t y = 0; y < vecs.points.size(); ++y)
            if (vecs.points[x][static_cast<std::size_t>(j)] != vecs.points[y][static_cast<std::size_t>(j)])
              worst_entry = std::max(worst_entry, std::abs(pp(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y))));
      }
    }
  }
  o.expect(worst <= 1e-9, "projector residual " + str(worst));
  o.expect(worst_entry <= 1e-12, "masked entry " + str(worst_entry));
  double tensor = 0.0;
  for (auto [n, q] : {std::pair{2, 2}, std::pair{2, 3}}) {
    InputDomain dom(n, q);
    auto t = build_tower(build_vectors(dom, Measure::uniform(dom.all_words()), n));
    auto levels = oracle::tensor_levels(n, q);
    for (int k = 0; k <= n; ++k) tensor = std::max(tensor, max_abs(t.level(k) - levels[static_cast<std::size_t>(k)]));
  }
  o.expect(tensor <= 1e-9, "tensor formula " + str(tensor));
  o.detail << "50 instances, worst residual " << str(worst) << ", worst cross-coordinate entry " << str(worst_entry)
           << ", tensor formula " << str(tensor);
}

// 5 ------------------------------------------------------------------------
void dual_round_trip(Outcome& o) {
  InputDomain dom(3, 2);
  Measure mu = Measure::uniform(residue_class(dom, 0)), nu = Measure::uniform(residue_class(dom, 1));
  auto phi = dual_from_distributions(dom, mu, nu, 1);
  o.expect(phi.degree == 2, "degree " + std::to_string(phi.degree));
  o.expect(validate_dual(phi, 2).valid(), "dual invalid");
  double obj = partial_dual_objective(phi, distribution_function(dom, mu, nu));
  o.expect(std::abs(obj - 0.5) <= 1e-12, "objective " + str(obj));
  auto back = split_total(phi);
  o.expect(back.mu.support() == mu.support() && back.nu.support() == nu.support(), "supports differ");
  bool exact = true;
  for (std::size_t i = 0; i < mu.size(); ++i) exact = exact && back.mu.weights()[i] == mu.weights()[i];
  for (std::size_t i = 0; i < nu.size(); ++i) exact = exact && back.nu.weights()[i] == nu.weights()[i];
  o.expect(exact, "split does not invert");
  o.detail << "degree 2, objective " << obj << ", split recovers (mu, nu) exactly";
}

// 6 ------------------------------------------------------------------------
std::vector<std::pair<PartialFunction, int>> certification_suite() {
  std::vector<std::pair<PartialFunction, int>> out;
  InputDomain cube(3, 2);
  for (unsigned bits = 1; bits + 1 < 256; ++bits) {
    std::vector<Word> x, y;
    for (std::uint64_t r = 0; r < 8; ++r) ((bits >> r) & 1u ? x : y).push_back(cube.word(r));
    out.emplace_back(PartialFunction(cube, x, y), 2);
  }
  std::mt19937 rng(5);
  for (int n = 4; n <= 5; ++n) {
    InputDomain dom(n, 2);
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<Word> x, y;
      for (const auto& w : dom.all_words()) {
        unsigned c = rng() % 4;
        if (c == 0) x.push_back(w);
        if (c == 1) y.push_back(w);
      }
      if (x.empty() || y.empty()) continue;
      out.emplace_back(PartialFunction(dom, x, y), 2 + trial % (n - 2));
    }
  }
  for (auto spec : {FunctionSpec{"parity", 5, {}, {}, {}, {}}, FunctionSpec{"majority", 5, {}, {}, {}, {}},
                    FunctionSpec{"and", 4, {}, {}, {}, {}}, FunctionSpec{"symmetric", 5, {0, -1, -1, -1, -1, 1}, {}, {}, {}}})
    out.emplace_back(spec.build(), spec.n - 1);
  return out;
}

void partial_chain(Outcome& o) {
  int certified = 0, strong = 0;
  for (const auto& [f, d] : certification_suite()) {
    Config cfg;
    cfg.eps = 0.125;
    auto cert = certify(f, d, cfg);
    if (!cert.negative_mass) continue;
    ++certified;
    if (cert.dual_objective < 1.0 / 3.0) continue;
    ++strong;
    const std::string tag = "n=" + std::to_string(cert.n) + " d=" + std::to_string(d) + " ";
    o.expect(*cert.negative_mass <= 2.0 / 3.0 + 1e-10, tag + "M = " + str(*cert.negative_mass));
    o.expect(*cert.mass_gap >= 0.5 - 1e-10, tag + "mass gap " + str(*cert.mass_gap));
    o.expect(*cert.correlation_gap_eighth >= 0.25 - 1e-10, tag + "correlation gap " + str(*cert.correlation_gap_eighth));
    if (cert.restricted_norm) {
      o.expect(*cert.restricted_norm >= *cert.norm / 4 - 1e-7, tag + "restricted norm " + str(*cert.restricted_norm));
    }
  }
  auto parity = certify(FunctionSpec{"parity", 5, {}, {}, {}, {}}.build(), 4);
  o.expect(parity.valid, "PARITY_5 certificate invalid at " + parity.failed_stage);
  o.expect(parity.restriction_factor && std::abs(*parity.restriction_factor - 1.0) <= 1e-9, "PARITY_5 restriction lossy");
  o.detail << certified << " certified instances, " << strong << " with objective >= 1/3; PARITY_5 factor 1";
}

// 7 ------------------------------------------------------------------------
void masked_substitute(Outcome& o) {
  int built = 0;
  auto check = [&](const AdversaryMatrix& adv, const std::string& tag) {
    ++built;
    for (const auto& mn : adv.masked) {
      const double factor = adv.domain.is_boolean() ? 1.0 : 2.0;
      o.expect(mn.norm <= factor * mn.substitute_norm + 1e-7, tag + " j=" + std::to_string(mn.coordinate + 1));
      o.expect(mn.norm <= 2.0 * mn.substitute_norm + 1e-7, tag + " j=" + std::to_string(mn.coordinate + 1));
    }
  };
  for (int n = 3; n <= 7; ++n) {
    InputDomain dom(n, 2);
    for (int m = 1; m <= (n - 1) / 2; ++m)
      check(build_adversary(dom, Measure::uniform(residue_class(dom, 0)), Measure::uniform(residue_class(dom, 1)), m),
            "parity n=" + std::to_string(n));
  }
  for (int n = 3; n <= 4; ++n) {
    InputDomain dom(n, 3);
    for (int r = 1; r < 3; ++r)
      check(build_adversary(dom, Measure::uniform(residue_class(dom, 0)), Measure::uniform(residue_class(dom, r)), 1),
            "mod-3 n=" + std::to_string(n));
  }
  for (const auto& [f, d] : certification_suite()) {
    if (d < 2) continue;
    auto lp = f.is_total() ? solve_lp_total(f, d) : solve_lp_partial(f, d);
    if (!lp.dual || lp.epsilon_star <= 1e-8) continue;
    auto split = f.is_total() ? split_total(*lp.dual, f) : split_partial(*lp.dual, f);
    if (!check_gram(f.domain(), split.mu, split.nu, d / 2).pass) continue;
    check(build_adversary(f.domain(), split.mu, split.nu, d / 2), "lp dual n=" + std::to_string(f.domain().n()));
  }
  o.detail << built << " adversary matrices, every coordinate";
}

// 8 ------------------------------------------------------------------------
std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  int raw = pclose(p);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

void determinism(Outcome& o) {
  const std::string cmd = std::string(ADVCERT_CLI) + " certify --fn parity --n 5 --d 4 --seed 0 --json - 2>/dev/null";
  int s1 = 0, s2 = 0;
  std::string a = capture(cmd, s1);
  std::string b = capture(cmd, s2);
  o.expect(s1 == 0 && s2 == 0, "exit status " + std::to_string(s1) + "/" + std::to_string(s2));
  o.expect(!a.empty() && a == b, "payloads differ");
  o.expect(parse_json_text(a, "stdout")["certificate"]["valid"] == true, "certificate invalid");
  o.detail << "two runs, " << a.size() << " identical bytes";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"parity family adversary", parity_family},
      {"approximation LP duality", lp_duality},
      {"dual validity equivalence", dual_equivalence},
      {"projector identities", projector_identities},
      {"dual from distributions", dual_round_trip},
      {"partial-function chain", partial_chain},
      {"masked-norm substitute", masked_substitute},
      {"certificate determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << " exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << (o.ok ? "PASS" : "FAIL") << "  criterion " << i + 1 << "  " << criteria[i].first << ": "
              << o.detail.str() << " (" << o.checks << " checks, " << timing << ")\n";
    failed += !o.ok;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << "\n";
  return failed ? 1 : 0;
}
