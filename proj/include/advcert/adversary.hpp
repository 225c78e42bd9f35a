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

// Adversary matrices built from two distributions with matching low-order
// marginals: the Gram check, the isometry W, Gamma = W sum_{k<m} Pi^Y_{<=k},
// Delta_j masks, the distributional bound and the restriction to X x Y.

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "advcert/config.hpp"
#include "advcert/core.hpp"
#include "advcert/decomp.hpp"
#include "advcert/linalg.hpp"

namespace advcert {

struct GramReport {
  int m = 0;
  double max_deviation = 0.0;
  Assignment worst_left;
  Assignment worst_right;
  bool pass = false;
};

// Compares <v^X_a, v^X_b> with <v^Y_a, v^Y_b> over all |a|, |b| <= m.
inline GramReport check_gram(const InputDomain& dom, const Measure& mu, const Measure& nu, int m,
                             const Config& cfg = {}) {
  if (m < 0 || m > dom.n()) throw std::invalid_argument("level m must lie in [0, n]");
  auto vx = build_vectors(dom, mu, m, cfg.limits);
  auto vy = build_vectors(dom, nu, m, cfg.limits);
  Matrix diff = vx.vectors.transpose() * vx.vectors - vy.vectors.transpose() * vy.vectors;
  GramReport rep;
  rep.m = m;
  Eigen::Index r = 0, c = 0;
  rep.max_deviation = diff.cwiseAbs().maxCoeff(&r, &c);
  rep.worst_left = vx.assignments[static_cast<std::size_t>(r)];
  rep.worst_right = vx.assignments[static_cast<std::size_t>(c)];
  rep.pass = rep.max_deviation <= cfg.tol.gram;
  return rep;
}

struct MarginalReport {
  int level = 0;
  double max_deviation = 0.0;
  Assignment worst;
  bool pass = false;
};

// max_{|a| <= level} |Pr_mu[x ~ a] - Pr_nu[y ~ a]|
inline MarginalReport check_marginals(const InputDomain& dom, const Measure& mu, const Measure& nu, int level,
                                      const Config& cfg = {}) {
  MarginalReport rep;
  rep.level = level;
  for (const auto& a : enumerate_assignments(dom, level, cfg.limits)) {
    double dev = std::abs(marginal(mu, a) - marginal(nu, a));
    if (a.weight() == 0 || dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst = a;
    }
  }
  rep.pass = rep.max_deviation <= cfg.tol.gram;
  return rep;
}

struct Isometry {
  Matrix w;                         // |supp mu| x |supp nu|
  double vector_residual = 0.0;     // max_a ||W v^Y_a - v^X_a||
  double domain_residual = 0.0;     // ||W^T W - Pi^Y_{<=m}||_F
  double range_residual = 0.0;      // ||W W^T - Pi^X_{<=m}||_F
};

namespace detail {

inline int largest_matching_level(const InputDomain& dom, const Measure& mu, const Measure& nu, int below,
                                  const Config& cfg) {
  for (int l = std::min(below, dom.n()); l >= 0; --l)
    if (check_gram(dom, mu, nu, l, cfg).pass) return l;
  return -1;
}

inline void require_gram(const InputDomain& dom, const Measure& mu, const Measure& nu, int m, const Config& cfg) {
  if (m > dom.n()) throw LevelTooLarge("level m = " + std::to_string(m) + " exceeds n", dom.n());
  GramReport rep = check_gram(dom, mu, nu, m, cfg);
  if (rep.pass) return;
  int supported = largest_matching_level(dom, mu, nu, m - 1, cfg);
  std::string detail = "Gram matrices differ by " + std::to_string(rep.max_deviation) + " at (" +
                       rep.worst_left.to_string() + ", " + rep.worst_right.to_string() + ")";
  if (supported >= 1) {
    throw LevelTooLarge("marginal matching supports m <= " + std::to_string(supported) + " only; " + detail,
                        supported);
  }
  throw GramMismatch(detail);
}

inline Isometry isometry_from(const AssignmentVectors& vx, const AssignmentVectors& vy, double rank_tol) {
  // Orthonormal bases B_Y = V_Y U L^{-1/2}, B_X = V_X U L^{-1/2} from the
  // common Gram matrix; W = B_X B_Y^T sends v^Y_a to v^X_a.
  Isometry iso;
  Eigen::SelfAdjointEigenSolver<Matrix> es(vy.vectors.transpose() * vy.vectors);
  const Vector& lambda = es.eigenvalues();
  const double top = lambda.size() ? lambda.maxCoeff() : 0.0;
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > rank_tol * top) ++keep;
  Matrix u = es.eigenvectors().rightCols(keep);
  Vector inv_sqrt = lambda.tail(keep).cwiseSqrt().cwiseInverse();
  Matrix by = vy.vectors * u * inv_sqrt.asDiagonal();
  Matrix bx = vx.vectors * u * inv_sqrt.asDiagonal();
  iso.w = bx * by.transpose();

  Matrix image = iso.w * vy.vectors - vx.vectors;
  iso.vector_residual = image.size() ? image.colwise().norm().maxCoeff() : 0.0;
  iso.domain_residual = (iso.w.transpose() * iso.w - span_projector(vy.vectors, rank_tol)).norm();
  iso.range_residual = (iso.w * iso.w.transpose() - span_projector(vx.vectors, rank_tol)).norm();
  return iso;
}

}  // namespace detail

// The isometry W with W v^Y_a = v^X_a for |a| <= m, zero off Pi^Y_{<=m}.
inline Isometry build_isometry(const InputDomain& dom, const Measure& mu, const Measure& nu, int m,
                               const Config& cfg = {}) {
  detail::require_gram(dom, mu, nu, m, cfg);
  auto vx = build_vectors(dom, mu, m, cfg.limits);
  auto vy = build_vectors(dom, nu, m, cfg.limits);
  return detail::isometry_from(vx, vy, cfg.tol.rank);
}

// Zeroes every entry (x, y) with x_j = y_j.
inline Matrix mask(const Matrix& g, const std::vector<Word>& rows, const std::vector<Word>& cols, int j) {
  if (static_cast<std::size_t>(g.rows()) != rows.size() || static_cast<std::size_t>(g.cols()) != cols.size()) {
    throw std::invalid_argument("mask: labels do not match matrix shape");
  }
  Matrix out = g;
  const auto jj = static_cast<std::size_t>(j);
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      if (rows[static_cast<std::size_t>(r)][jj] == cols[static_cast<std::size_t>(c)][jj]) out(r, c) = 0.0;
  return out;
}

struct MaskedNorm {
  int coordinate = 0;
  double norm = 0.0;                 // ||Gamma o Delta_j||
  double substitute_norm = 0.0;      // ||B_j||, B_j = W sum_{k<m}(Pi^Y_{<=k} - Pi'^Y_{<=k}(j))
  double substitute_residual = 0.0;  // max |(Gamma - B_j) o Delta_j|
  bool mask_bound_ok = false;             // norm <= 2||B_j|| (<= ||B_j|| when q = 2)
};

struct AdversaryMatrix {
  InputDomain domain;
  int m = 0;
  std::vector<Word> rows;  // supp mu, rank order
  std::vector<Word> cols;  // supp nu, rank order
  Measure mu;
  Measure nu;
  Matrix gamma;
  Isometry isometry;
  double norm = 0.0;
  double correlation = 0.0;         // delta_mu^T Gamma delta_nu
  double top_vector_residual = 0.0; // max(||Gamma d_nu - m d_mu||, ||Gamma^T d_mu - m d_nu||)
  std::vector<MaskedNorm> masked;

  double max_masked_norm() const {
    double best = 0.0;
    for (const auto& mn : masked) best = std::max(best, mn.norm);
    return best;
  }
  double mask_bound() const { return domain.is_boolean() ? 1.0 : 2.0; }

  bool checks_pass(double tol) const {
    if (std::abs(norm - m) > tol || std::abs(correlation - m) > tol || top_vector_residual > tol) return false;
    for (const auto& mn : masked) {
      if (mn.norm > mask_bound() + tol || mn.substitute_norm > 1.0 + tol || !mn.mask_bound_ok) return false;
    }
    return true;
  }
};

inline AdversaryMatrix build_adversary(const InputDomain& dom, const Measure& mu, const Measure& nu, int m,
                                       const Config& cfg = {}) {
  if (m < 1) throw std::invalid_argument("adversary construction needs m >= 1");
  detail::require_gram(dom, mu, nu, m, cfg);
  auto vx = build_vectors(dom, mu, m, cfg.limits);
  auto vy = build_vectors(dom, nu, m, cfg.limits);

  AdversaryMatrix adv{dom, m, mu.support(), nu.support(), mu, nu, Matrix(), Isometry(), 0.0, 0.0, 0.0, {}};
  adv.isometry = detail::isometry_from(vx, vy, cfg.tol.rank);
  const Matrix& w = adv.isometry.w;

  ProjectorTower ty = build_tower(vy, std::nullopt, cfg.tol.rank);
  adv.gamma = w * standard_form(ty, m);
  adv.norm = spectral_norm(adv.gamma, cfg.limits.dense_norm_dim, cfg.seed);
  const Vector dmu = vx.delta();
  const Vector dnu = vy.delta();
  adv.correlation = dmu.dot(adv.gamma * dnu);
  adv.top_vector_residual = std::max((adv.gamma * dnu - m * dmu).norm(), (adv.gamma.transpose() * dmu - m * dnu).norm());

  auto per_coordinate = [&](int j) {
    MaskedNorm mn;
    mn.coordinate = j;
    auto prime = build_prime_levels(vy, j, cfg.tol.rank);
    Matrix inner = Matrix::Zero(ty.dim(), ty.dim());
    for (int k = 0; k < m; ++k) inner += ty.le[static_cast<std::size_t>(k)] - prime[static_cast<std::size_t>(k)];
    Matrix b = w * inner;
    Matrix masked_gamma = mask(adv.gamma, adv.rows, adv.cols, j);
    mn.norm = spectral_norm(masked_gamma, cfg.limits.dense_norm_dim, cfg.seed);
    mn.substitute_norm = spectral_norm(b, cfg.limits.dense_norm_dim, cfg.seed);
    mn.substitute_residual = max_abs(masked_gamma - mask(b, adv.rows, adv.cols, j));
    double factor = dom.is_boolean() ? 1.0 : 2.0;
    mn.mask_bound_ok = mn.norm <= factor * mn.substitute_norm + cfg.tol.norm;
    return mn;
  };
  std::vector<std::future<MaskedNorm>> jobs;
  for (int j = 0; j < dom.n(); ++j) jobs.push_back(std::async(std::launch::async, per_coordinate, j));
  for (auto& job : jobs) adv.masked.push_back(job.get());
  return adv;
}

// Upper bound from the overlap penalty: 1 - |s_mu - s_nu|^2 / 8.
inline double tau_upper_bound(double s_mu, double s_nu) { return 1.0 - (s_mu - s_nu) * (s_mu - s_nu) / 8.0; }

inline double tau(double s_mu, double s_nu) {
  if (!(s_mu >= 0.0 && s_mu <= 1.0 && s_nu >= 0.0 && s_nu <= 1.0)) {
    throw std::invalid_argument("acceptance probabilities must lie in [0, 1]");
  }
  double t = std::sqrt(s_mu * s_nu) + std::sqrt((1.0 - s_mu) * (1.0 - s_nu));
  if (t > tau_upper_bound(s_mu, s_nu) + 1e-12) throw std::logic_error("tau exceeds 1 - |s_mu - s_nu|^2 / 8");
  return t;
}

struct BoundValue {
  double s_mu = 0.0;
  double s_nu = 0.0;
  double correlation = 0.0;
  double tau = 0.0;
  double norm = 0.0;
  double max_masked = 0.0;
  double bound = 0.0;  // (correlation - tau * norm) / max_masked, no hidden constant

  friend bool operator==(const BoundValue&, const BoundValue&) = default;
};

inline BoundValue distributional_bound(const AdversaryMatrix& adv, double s_mu, double s_nu) {
  BoundValue b;
  b.s_mu = s_mu;
  b.s_nu = s_nu;
  b.correlation = adv.correlation;
  b.tau = tau(s_mu, s_nu);
  b.norm = adv.norm;
  b.max_masked = adv.max_masked_norm();
  double numerator = b.correlation - b.tau * b.norm;
  if (b.max_masked > 0.0) {
    b.bound = numerator / b.max_masked;
  } else {
    b.bound = numerator > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return b;
}

struct RestrictionReport {
  std::vector<Word> rows;  // supp mu intersected with X
  std::vector<Word> cols;  // supp nu intersected with Y
  Matrix gamma_xy;
  double parent_norm = 0.0;
  double norm = 0.0;
  double factor = 0.0;        // norm / parent_norm
  double mass_x = 0.0;        // ||delta_mu[X]||^2
  double mass_not_y = 0.0;    // ||delta_nu[Y-bar]||^2
  double mass_gap = 0.0;      // mass_x - mass_not_y
  double denominator = 0.0;   // ||delta_mu[X]|| + ||delta_nu[Y-bar]||
  double chain_lower = 0.0;   // parent_norm * (||delta_mu[X]|| - ||delta_nu[Y-bar]||)
  std::vector<double> masked_norms;
  bool chain_ok = false;          // norm >= chain_lower
  bool quarter_applicable = false;  // mass_gap >= 1/2
  bool quarter_ok = false;        // norm >= parent_norm / 4 (vacuous if not applicable)
  bool denominator_ok = false;    // denominator <= 2
  bool masks_inherited = false;   // masked norms do not exceed the parent's
};

inline RestrictionReport restrict_and_bound(const AdversaryMatrix& adv, const std::vector<Word>& x_set,
                                            const std::vector<Word>& y_set, const Config& cfg = {}) {
  RestrictionReport rep;
  std::vector<Eigen::Index> ri, ci;
  for (std::size_t i = 0; i < adv.rows.size(); ++i) {
    const bool in_x = std::find(x_set.begin(), x_set.end(), adv.rows[i]) != x_set.end();
    if (in_x) {
      ri.push_back(static_cast<Eigen::Index>(i));
      rep.rows.push_back(adv.rows[i]);
      rep.mass_x += adv.mu.weights()[i];
    }
  }
  for (std::size_t i = 0; i < adv.cols.size(); ++i) {
    const bool in_y = std::find(y_set.begin(), y_set.end(), adv.cols[i]) != y_set.end();
    if (in_y) {
      ci.push_back(static_cast<Eigen::Index>(i));
      rep.cols.push_back(adv.cols[i]);
    } else {
      rep.mass_not_y += adv.nu.weights()[i];
    }
  }
  rep.gamma_xy = Matrix(static_cast<Eigen::Index>(ri.size()), static_cast<Eigen::Index>(ci.size()));
  for (std::size_t r = 0; r < ri.size(); ++r)
    for (std::size_t c = 0; c < ci.size(); ++c)
      rep.gamma_xy(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = adv.gamma(ri[r], ci[c]);

  const double tol = cfg.tol.norm;
  rep.parent_norm = adv.norm;
  rep.norm = spectral_norm(rep.gamma_xy, cfg.limits.dense_norm_dim, cfg.seed);
  rep.factor = rep.parent_norm > 0.0 ? rep.norm / rep.parent_norm : 0.0;
  rep.mass_gap = rep.mass_x - rep.mass_not_y;
  rep.denominator = std::sqrt(rep.mass_x) + std::sqrt(rep.mass_not_y);
  rep.chain_lower = rep.parent_norm * (std::sqrt(rep.mass_x) - std::sqrt(rep.mass_not_y));
  rep.chain_ok = rep.norm >= rep.chain_lower - tol;
  rep.quarter_applicable = rep.mass_gap >= 0.5 - cfg.tol.gram;
  rep.quarter_ok = !rep.quarter_applicable || rep.norm >= rep.parent_norm / 4.0 - tol;
  rep.denominator_ok = rep.denominator <= 2.0 + tol;
  rep.masks_inherited = true;
  for (int j = 0; j < adv.domain.n(); ++j) {
    double mn = rep.gamma_xy.size() ? spectral_norm(mask(rep.gamma_xy, rep.rows, rep.cols, j),
                                                    cfg.limits.dense_norm_dim, cfg.seed)
                                     : 0.0;
    rep.masked_norms.push_back(mn);
    if (mn > adv.masked[static_cast<std::size_t>(j)].norm + tol) rep.masks_inherited = false;
  }
  return rep;
}

inline RestrictionReport restrict_and_bound(const AdversaryMatrix& adv, const PartialFunction& f,
                                            const Config& cfg = {}) {
  return restrict_and_bound(adv, f.ones(), f.zeros(), cfg);
}

}  // namespace advcert
