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

// Characters, polynomials and dual polynomials over {0,1}^n, and the two
// approximation linear programs (total functions, and partial functions with
// [0,1]-boundedness off the promise).

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "advcert/config.hpp"
#include "advcert/core.hpp"
#include "advcert/simplex.hpp"

namespace advcert {

using IndexSet = std::vector<int>;  // sorted 0-based coordinates

inline std::string format_index_set(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(s[i] + 1);
  }
  return out + "}";
}

// chi_S(x) = prod_{i in S} (-1)^{x_i}, for x in {0,1}^n.
inline int chi(const InputDomain& dom, std::span<const int> s, std::span<const int> x) {
  if (!dom.is_boolean()) throw BooleanOnly();
  int sign = 1;
  for (int i : s)
    if (x[static_cast<std::size_t>(i)] & 1) sign = -sign;
  return sign;
}

// All S with |S| <= d, ordered by size and then lexicographically.
inline std::vector<IndexSet> subsets_up_to(int n, int d) {
  std::vector<IndexSet> out;
  for (int k = 0; k <= std::min(d, n); ++k) {
    auto level = index_sets(n, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

// Multilinear polynomial in the character basis.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(InputDomain dom, std::vector<IndexSet> monomials, std::vector<double> coeffs)
      : dom_(dom), monomials_(std::move(monomials)), coeffs_(std::move(coeffs)) {
    if (!dom_->is_boolean()) throw BooleanOnly();
    if (monomials_.size() != coeffs_.size()) throw std::invalid_argument("monomial/coefficient size mismatch");
  }

  double operator()(std::span<const int> x) const {
    double v = 0.0;
    for (std::size_t k = 0; k < monomials_.size(); ++k) v += coeffs_[k] * chi(*dom_, monomials_[k], x);
    return v;
  }

  int degree(double tol = 0.0) const {
    int d = -1;
    for (std::size_t k = 0; k < monomials_.size(); ++k)
      if (std::abs(coeffs_[k]) > tol) d = std::max(d, static_cast<int>(monomials_[k].size()));
    return d;
  }

  const std::vector<IndexSet>& monomials() const { return monomials_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  std::optional<InputDomain> dom_;
  std::vector<IndexSet> monomials_;
  std::vector<double> coeffs_;
};

// A signed table phi over {0,1}^n (indexed by rank) with a claimed degree.
struct DualPolynomial {
  InputDomain domain;
  std::vector<double> values;
  int degree = 0;

  DualPolynomial(InputDomain dom, std::vector<double> v, int d) : domain(dom), values(std::move(v)), degree(d) {
    if (!domain.is_boolean()) throw BooleanOnly();
    if (values.size() != domain.size()) throw std::invalid_argument("dual table must have 2^n entries");
  }

  double at(std::span<const int> x) const { return values[static_cast<std::size_t>(domain.rank(x))]; }

  double l1_norm() const {
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    return s;
  }

  // phi = chi_[n] / 2^n, a degree-(n-1) dual polynomial.
  static DualPolynomial normalized_parity(const InputDomain& dom) {
    std::vector<double> v(dom.size());
    IndexSet all(static_cast<std::size_t>(dom.n()));
    for (int i = 0; i < dom.n(); ++i) all[static_cast<std::size_t>(i)] = i;
    for (std::uint64_t r = 0; r < dom.size(); ++r)
      v[r] = chi(dom, all, dom.word(r)) / static_cast<double>(dom.size());
    return DualPolynomial(dom, std::move(v), dom.n() - 1);
  }
};

inline double character_sum(const DualPolynomial& phi, const IndexSet& s) {
  double acc = 0.0;
  for (std::uint64_t r = 0; r < phi.domain.size(); ++r) acc += phi.values[r] * chi(phi.domain, s, phi.domain.word(r));
  return acc;
}

struct DualReport {
  int degree = 0;
  double l1_norm = 0.0;
  double character_violation = 0.0;  // max_{|S|<=d} |sum_x phi(x) chi_S(x)|
  IndexSet worst_character;
  double assignment_violation = 0.0;  // max_{|a|<=d} |sum_{x~a} phi(x)|
  Assignment worst_assignment;
  // Largest discrepancy between the directly summed assignment sums and the
  // ones reconstructed from the character sums.
  double basis_change_residual = 0.0;
  bool character_ok = false;
  bool assignment_ok = false;

  bool valid() const { return character_ok && assignment_ok; }
  bool verdicts_agree() const { return character_ok == assignment_ok; }
};

// Checks both forms of the degree-d orthogonality condition.
inline DualReport validate_dual(const DualPolynomial& phi, int d, double tol = 1e-9) {
  const InputDomain& dom = phi.domain;
  if (d < 0 || d > dom.n()) throw std::invalid_argument("degree must lie in [0, n]");
  DualReport rep;
  rep.degree = d;
  rep.l1_norm = phi.l1_norm();

  auto sets = subsets_up_to(dom.n(), d);
  std::vector<double> hat(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    hat[k] = character_sum(phi, sets[k]);
    if (k == 0 || std::abs(hat[k]) > rep.character_violation) {
      rep.character_violation = std::abs(hat[k]);
      rep.worst_character = sets[k];
    }
  }

  auto words = dom.all_words();
  for (const auto& a : enumerate_assignments(dom, d, Limits{dom.size(), std::size_t{1} << 24})) {
    double direct = 0.0;
    for (std::uint64_t r = 0; r < dom.size(); ++r)
      if (agrees(words[r], a)) direct += phi.values[r];
    // 1_{x~a} = 2^{-|a|} sum_{S subset dom(a)} chi_S(x) chi_S(a)
    double predicted = 0.0;
    for (std::size_t k = 0; k < sets.size(); ++k) {
      int sign = 1;
      bool inside = true;
      for (int i : sets[k]) {
        auto s = a.at(i);
        if (!s) {
          inside = false;
          break;
        }
        if (*s & 1) sign = -sign;
      }
      if (inside) predicted += sign * hat[k];
    }
    predicted = std::ldexp(predicted, -a.weight());
    rep.basis_change_residual = std::max(rep.basis_change_residual, std::abs(direct - predicted));
    if (a.weight() == 0 || std::abs(direct) > rep.assignment_violation) {
      rep.assignment_violation = std::abs(direct);
      rep.worst_assignment = a;
    }
  }
  rep.character_ok = rep.character_violation <= tol;
  rep.assignment_ok = rep.assignment_violation <= tol;
  return rep;
}

// sum_x phi(x) f(x)
inline double total_dual_objective(const DualPolynomial& phi, const PartialFunction& f) {
  double s = 0.0;
  for (const auto& x : f.ones()) s += phi.at(x);
  return s;
}

// sum_{x in X} phi^+(x) - sum_{x notin Y} phi^-(x)
inline double partial_dual_objective(const DualPolynomial& phi, const PartialFunction& f) {
  double s = 0.0;
  for (std::uint64_t r = 0; r < phi.domain.size(); ++r) {
    Word x = phi.domain.word(r);
    double v = phi.values[r];
    if (v > 0 && f.in_ones(x)) s += v;
    if (v < 0 && !f.in_zeros(x)) s += v;
  }
  return s;
}

// sum_{x in X} phi^+(x) + sum_{x in Y} phi^-(x)
inline double partial_normalization(const DualPolynomial& phi, const PartialFunction& f) {
  double s = 0.0;
  for (const auto& x : f.ones()) s += std::max(0.0, phi.at(x));
  for (const auto& y : f.zeros()) s += std::max(0.0, -phi.at(y));
  return s;
}

struct ApproxResult {
  double epsilon_star = 0.0;
  Polynomial witness;
  std::optional<DualPolynomial> dual;
  double dual_objective = 0.0;  // value of the dual at the returned phi
  double gap = 0.0;             // |epsilon_star - dual_objective|
  // Largest x-wise overlap of the positive and negative dual multipliers;
  // zero when complementary slackness holds.
  double slackness_residual = 0.0;
  bool complementary_slackness = true;
  bool clamped = false;         // partial LP with epsilon_star = 0: no dual reported
  std::string note;
};

namespace detail {

inline Eigen::MatrixXd character_matrix(const InputDomain& dom, const std::vector<IndexSet>& sets) {
  Eigen::MatrixXd chi_m(static_cast<Eigen::Index>(dom.size()), static_cast<Eigen::Index>(sets.size()));
  for (std::uint64_t r = 0; r < dom.size(); ++r) {
    Word x = dom.word(r);
    for (std::size_t k = 0; k < sets.size(); ++k)
      chi_m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = chi(dom, sets[k], x);
  }
  return chi_m;
}

inline void check_degree(const InputDomain& dom, int d) {
  if (!dom.is_boolean()) throw BooleanOnly();
  if (d < 0 || d >= dom.n()) {
    throw std::invalid_argument("require d < n (got d = " + std::to_string(d) + ", n = " + std::to_string(dom.n()) + ")");
  }
}

inline LpSolution run(const LinearProgram& lp) {
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError(sol.status == LpStatus::kInfeasible   ? "approximation LP reported infeasible"
                      : sol.status == LpStatus::kUnbounded ? "approximation LP reported unbounded"
                                                           : "approximation LP hit the iteration limit");
  }
  return sol;
}

inline Polynomial witness(const InputDomain& dom, const std::vector<IndexSet>& sets, const Eigen::VectorXd& x) {
  const auto k = static_cast<Eigen::Index>(sets.size());
  std::vector<double> coeffs(sets.size());
  for (Eigen::Index s = 0; s < k; ++s) coeffs[static_cast<std::size_t>(s)] = x(s) - x(k + s);
  return Polynomial(dom, sets, std::move(coeffs));
}

}  // namespace detail

// min_p max_x |f(x) - p(x)| over degree-d p, for a real-valued table f.
inline ApproxResult solve_lp_total(const InputDomain& dom, std::span<const double> f, int d,
                                   const Tolerances& tol = {}) {
  detail::check_degree(dom, d);
  if (f.size() != dom.size()) throw std::invalid_argument("function table must have 2^n entries");
  auto sets = subsets_up_to(dom.n(), d);
  const Eigen::MatrixXd chi_m = detail::character_matrix(dom, sets);
  const auto points = static_cast<Eigen::Index>(dom.size());
  const auto k = static_cast<Eigen::Index>(sets.size());

  // Variables (alpha+, alpha-, eps); rows: f - p <= eps, then p - f <= eps.
  LinearProgram lp;
  lp.A = Eigen::MatrixXd::Zero(2 * points, 2 * k + 1);
  lp.b.resize(2 * points);
  lp.c = Eigen::VectorXd::Zero(2 * k + 1);
  lp.c(2 * k) = -1.0;
  for (Eigen::Index r = 0; r < points; ++r) {
    lp.A.block(r, 0, 1, k) = -chi_m.row(r);
    lp.A.block(r, k, 1, k) = chi_m.row(r);
    lp.A(r, 2 * k) = -1.0;
    lp.b(r) = -f[static_cast<std::size_t>(r)];
    lp.A.block(points + r, 0, 1, k) = chi_m.row(r);
    lp.A.block(points + r, k, 1, k) = -chi_m.row(r);
    lp.A(points + r, 2 * k) = -1.0;
    lp.b(points + r) = f[static_cast<std::size_t>(r)];
  }
  LpSolution sol = detail::run(lp);

  ApproxResult out;
  out.epsilon_star = std::max(0.0, -sol.objective);
  out.witness = detail::witness(dom, sets, sol.x);

  if (out.epsilon_star <= tol.feasibility) {
    out.dual = DualPolynomial::normalized_parity(dom);
    out.note = "epsilon* = 0: reporting the normalized parity dual";
  } else {
    std::vector<double> phi(dom.size());
    double mass = 0.0;
    double overlap = 0.0;
    for (Eigen::Index r = 0; r < points; ++r) {
      double a = sol.y(r);
      double b = sol.y(points + r);
      phi[static_cast<std::size_t>(r)] = a - b;
      mass += a + b;
      overlap = std::max(overlap, std::min(a, b));
    }
    out.slackness_residual = std::max(overlap, std::abs(mass - 1.0));
    out.complementary_slackness = out.slackness_residual <= tol.feasibility;
    out.dual = DualPolynomial(dom, std::move(phi), d);
  }
  double obj = 0.0;
  for (std::uint64_t r = 0; r < dom.size(); ++r) obj += out.dual->values[r] * f[r];
  out.dual_objective = obj;
  out.gap = std::abs(out.epsilon_star - obj);
  return out;
}

inline ApproxResult solve_lp_total(const PartialFunction& f, int d, const Tolerances& tol = {}) {
  if (!f.is_total()) throw std::invalid_argument("solve_lp_total requires a total function");
  const InputDomain& dom = f.domain();
  detail::check_degree(dom, d);
  std::vector<double> table(dom.size(), 0.0);
  for (const auto& x : f.ones()) table[static_cast<std::size_t>(dom.rank(x))] = 1.0;
  return solve_lp_total(dom, table, d, tol);
}

// Best epsilon for a degree-d p with |p - f| <= eps on X u Y and 0 <= p <= 1
// everywhere. When the optimum is 0 the clamp max{., 0} is active and no dual
// witness is returned.
inline ApproxResult solve_lp_partial(const PartialFunction& f, int d, const Tolerances& tol = {}) {
  const InputDomain& dom = f.domain();
  detail::check_degree(dom, d);
  if (f.ones().empty() || f.zeros().empty()) throw TrivialFunction("X and Y must both be non-empty");
  auto sets = subsets_up_to(dom.n(), d);
  const Eigen::MatrixXd chi_m = detail::character_matrix(dom, sets);
  const auto points = static_cast<Eigen::Index>(dom.size());
  const auto k = static_cast<Eigen::Index>(sets.size());

  enum Kind { kOnX, kOnY, kLower, kUpper };
  struct Row {
    Kind kind;
    Eigen::Index point;
  };
  std::vector<Row> rows;
  for (Eigen::Index r = 0; r < points; ++r) {
    Word x = dom.word(static_cast<std::uint64_t>(r));
    bool in_x = f.in_ones(x);
    bool in_y = f.in_zeros(x);
    if (in_x) rows.push_back({kOnX, r});
    if (in_y) rows.push_back({kOnY, r});
    if (!in_x) rows.push_back({kLower, r});
    if (!in_y) rows.push_back({kUpper, r});
  }

  LinearProgram lp;
  const auto m = static_cast<Eigen::Index>(rows.size());
  lp.A = Eigen::MatrixXd::Zero(m, 2 * k + 1);
  lp.b = Eigen::VectorXd::Zero(m);
  lp.c = Eigen::VectorXd::Zero(2 * k + 1);
  lp.c(2 * k) = -1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Row& row = rows[static_cast<std::size_t>(i)];
    double sign = (row.kind == kOnY || row.kind == kUpper) ? 1.0 : -1.0;
    lp.A.block(i, 0, 1, k) = sign * chi_m.row(row.point);
    lp.A.block(i, k, 1, k) = -sign * chi_m.row(row.point);
    switch (row.kind) {
      case kOnX:  // p >= 1 - eps
        lp.A(i, 2 * k) = -1.0;
        lp.b(i) = -1.0;
        break;
      case kOnY:  // p <= eps
        lp.A(i, 2 * k) = -1.0;
        break;
      case kLower:  // p >= 0
        break;
      case kUpper:  // p <= 1
        lp.b(i) = 1.0;
        break;
    }
  }
  LpSolution sol = detail::run(lp);

  ApproxResult out;
  out.epsilon_star = std::max(0.0, -sol.objective);
  out.witness = detail::witness(dom, sets, sol.x);
  if (out.epsilon_star <= tol.feasibility) {
    out.clamped = true;
    out.note = "epsilon* = 0: the clamp at 0 is active, no dual witness is reported";
    out.dual_objective = 0.0;
    out.gap = out.epsilon_star;
    return out;
  }

  // phi = a - d on X, c - b on Y, c - d elsewhere.
  std::vector<double> a(dom.size(), 0.0), b(dom.size(), 0.0), c(dom.size(), 0.0), dd(dom.size(), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Row& row = rows[static_cast<std::size_t>(i)];
    auto p = static_cast<std::size_t>(row.point);
    double y = sol.y(i);
    switch (row.kind) {
      case kOnX: a[p] = y; break;
      case kOnY: b[p] = y; break;
      case kLower: c[p] = y; break;
      case kUpper: dd[p] = y; break;
    }
  }
  std::vector<double> phi(dom.size());
  double overlap = 0.0;
  for (std::size_t p = 0; p < dom.size(); ++p) {
    double pos = a[p] + c[p];
    double neg = b[p] + dd[p];
    phi[p] = pos - neg;
    overlap = std::max(overlap, std::min(pos, neg));
  }
  out.slackness_residual = overlap;
  out.complementary_slackness = overlap <= tol.feasibility;
  out.dual = DualPolynomial(dom, std::move(phi), d);
  out.dual_objective = partial_dual_objective(*out.dual, f);
  out.gap = std::abs(out.epsilon_star - out.dual_objective);
  return out;
}

}  // namespace advcert
