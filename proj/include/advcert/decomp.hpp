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

// Decomposition of R^X induced by a measure mu on X.
//
// For an assignment a, v_a = sum_{x ~ a} sqrt(mu_x) |x>. The projector Pi_{<=k}
// is onto span{v_a : |a| = k}, and Pi'_{<=k}(j) onto the span of those v_a with
// a defined on coordinate j. Zero-mass points stay in the index set.

#include <optional>
#include <vector>

#include "advcert/config.hpp"
#include "advcert/core.hpp"
#include "advcert/linalg.hpp"

namespace advcert {

struct AssignmentVectors {
  InputDomain domain;
  std::vector<Word> points;
  std::vector<double> mass;
  std::vector<Assignment> assignments;  // weight <= kmax, canonical order
  Matrix vectors;                       // column c is v_{assignments[c]}
  int kmax = 0;

  Matrix columns_where(auto&& pred) const {
    std::vector<Eigen::Index> idx;
    for (std::size_t c = 0; c < assignments.size(); ++c)
      if (pred(assignments[c])) idx.push_back(static_cast<Eigen::Index>(c));
    Matrix out(vectors.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t t = 0; t < idx.size(); ++t) out.col(static_cast<Eigen::Index>(t)) = vectors.col(idx[t]);
    return out;
  }

  Matrix columns_of_weight(int k) const {
    return columns_where([k](const Assignment& a) { return a.weight() == k; });
  }

  Matrix columns_defined_on(int k, int j) const {
    return columns_where([k, j](const Assignment& a) { return a.weight() == k && a.defined_on(j); });
  }

  std::optional<Eigen::Index> column_of(const Assignment& a) const {
    auto it = std::lower_bound(assignments.begin(), assignments.end(), a);
    if (it == assignments.end() || !(*it == a)) return std::nullopt;
    return static_cast<Eigen::Index>(it - assignments.begin());
  }

  // v_a for any assignment, including ones above kmax.
  Vector vector_for(const Assignment& a) const {
    if (auto c = column_of(a)) return vectors.col(*c);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
      if (agrees(points[i], a)) v(static_cast<Eigen::Index>(i)) = std::sqrt(mass[i]);
    return v;
  }

  // delta_mu = v_empty
  Vector delta() const { return vectors.col(0); }
};

inline AssignmentVectors build_vectors(const InputDomain& dom, const Measure& mu, int kmax,
                                       const Limits& limits = {}) {
  for (const auto& x : mu.support())
    if (!dom.contains(x)) throw std::invalid_argument("measure support leaves [q]^n at " + format_word(x));
  AssignmentVectors out{dom, mu.support(), mu.weights(), enumerate_assignments(dom, kmax, limits), Matrix(), kmax};
  const auto rows = static_cast<Eigen::Index>(out.points.size());
  out.vectors = Matrix::Zero(rows, static_cast<Eigen::Index>(out.assignments.size()));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double root = std::sqrt(out.mass[static_cast<std::size_t>(i)]);
    for (std::size_t c = 0; c < out.assignments.size(); ++c)
      if (agrees(out.points[static_cast<std::size_t>(i)], out.assignments[c]))
        out.vectors(i, static_cast<Eigen::Index>(c)) = root;
  }
  return out;
}

struct ProjectorTower {
  int kmax = 0;
  std::optional<int> coordinate;
  std::vector<Matrix> le;        // Pi_{<=k}, k = 0..kmax
  std::vector<Matrix> le_prime;  // Pi'_{<=k}(j), present iff coordinate is set

  // Pi_k = Pi_{<=k} - Pi_{<=k-1}
  Matrix level(int k) const {
    return k == 0 ? le[0] : Matrix(le[static_cast<std::size_t>(k)] - le[static_cast<std::size_t>(k - 1)]);
  }
  Eigen::Index dim() const { return le.empty() ? 0 : le.front().rows(); }
};

// Pi'_{<=k}(j) for k = 0..kmax; the k = 0 entry is the zero projector.
inline std::vector<Matrix> build_prime_levels(const AssignmentVectors& vecs, int j, double rank_tol = 1e-10) {
  std::vector<Matrix> out;
  for (int k = 0; k <= vecs.kmax; ++k) out.push_back(span_projector(vecs.columns_defined_on(k, j), rank_tol));
  return out;
}

inline ProjectorTower build_tower(const AssignmentVectors& vecs, std::optional<int> j = std::nullopt,
                                  double rank_tol = 1e-10) {
  if (j && (*j < 0 || *j >= vecs.domain.n())) throw std::invalid_argument("coordinate out of range");
  ProjectorTower t;
  t.kmax = vecs.kmax;
  t.coordinate = j;
  for (int k = 0; k <= vecs.kmax; ++k) t.le.push_back(span_projector(vecs.columns_of_weight(k), rank_tol));
  if (j) t.le_prime = build_prime_levels(vecs, *j, rank_tol);
  return t;
}

// sum_{k=0}^{m-1} Pi_{<=k}
inline Matrix standard_form(const ProjectorTower& t, int m) {
  if (m < 0 || m > t.kmax) throw std::invalid_argument("standard form level exceeds tower height");
  Matrix s = Matrix::Zero(t.dim(), t.dim());
  for (int k = 0; k < m; ++k) s += t.le[static_cast<std::size_t>(k)];
  return s;
}

// sum_{k=0}^{m} (m - k) Pi_k, the level-wise form of the same matrix.
inline Matrix standard_form_levels(const ProjectorTower& t, int m) {
  if (m < 0 || m > t.kmax) throw std::invalid_argument("standard form level exceeds tower height");
  Matrix s = Matrix::Zero(t.dim(), t.dim());
  for (int k = 0; k <= m; ++k) s += static_cast<double>(m - k) * t.level(k);
  return s;
}

// sum_{k=0}^{m-1} (Pi_{<=k} - Pi'_{<=k}(j)): the substitute for the masked
// standard form. Each summand is a projector and they are pairwise orthogonal.
inline Matrix masked_standard(const ProjectorTower& t, int m) {
  if (!t.coordinate) throw std::invalid_argument("tower was built without a coordinate");
  if (m < 0 || m > t.kmax) throw std::invalid_argument("standard form level exceeds tower height");
  Matrix s = Matrix::Zero(t.dim(), t.dim());
  for (int k = 0; k < m; ++k) s += t.le[static_cast<std::size_t>(k)] - t.le_prime[static_cast<std::size_t>(k)];
  return s;
}

inline double masked_standard_norm(const ProjectorTower& t, int m) { return spectral_norm(masked_standard(t, m)); }

}  // namespace advcert
