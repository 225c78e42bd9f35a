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

// Dense linear-algebra helpers: projectors onto spans and spectral norms.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace advcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Orthonormal basis of the column span of `cols`, computed from the Gram
// matrix: eigenvalues below rel_tol * lambda_max are dropped.
inline Matrix span_basis(const Matrix& cols, double rel_tol = 1e-10) {
  if (cols.cols() == 0) return Matrix(cols.rows(), 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cols.transpose() * cols);
  const Vector& lambda = es.eigenvalues();
  const double top = lambda.maxCoeff();
  if (!(top > 0.0)) return Matrix(cols.rows(), 0);
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > rel_tol * top) ++keep;
  // Eigenvalues come sorted ascending; the kept ones are the trailing block.
  Matrix u = es.eigenvectors().rightCols(keep);
  Vector inv_sqrt = lambda.tail(keep).cwiseSqrt().cwiseInverse();
  return cols * u * inv_sqrt.asDiagonal();
}

inline Matrix span_projector(const Matrix& cols, double rel_tol = 1e-10) {
  Matrix b = span_basis(cols, rel_tol);
  if (b.cols() == 0) return Matrix::Zero(cols.rows(), cols.rows());
  return b * b.transpose();
}

// Largest singular value by power iteration on M^T M from a seeded start.
inline double spectral_norm_power(const Matrix& m, double tol = 1e-9, std::uint64_t seed = 0,
                                  int max_iter = 100000) {
  if (m.size() == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector mv = m * v;
    double next = mv.norm();
    if (next == 0.0) return 0.0;
    Vector w = m.transpose() * mv;
    double wn = w.norm();
    if (wn == 0.0) return next;
    v = w / wn;
    if (std::abs(next - sigma) <= tol * next) return next;
    sigma = next;
  }
  return sigma;
}

// Largest singular value. Up to `dense_dim` the smaller Gram matrix is fully
// eigendecomposed; larger matrices fall back to power iteration.
inline double spectral_norm(const Matrix& m, std::size_t dense_dim = 2048, std::uint64_t seed = 0) {
  if (m.size() == 0) return 0.0;
  if (static_cast<std::size_t>(std::max(m.rows(), m.cols())) > dense_dim) {
    return spectral_norm_power(m, 1e-9, seed);
  }
  Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.transpose()) : Matrix(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace advcert
