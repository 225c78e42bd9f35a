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

#include <random>

#include <gtest/gtest.h>

#include "advcert/simplex.hpp"
#include "oracles.hpp"

namespace advcert {
namespace {

LinearProgram make(std::initializer_list<std::initializer_list<double>> a, std::initializer_list<double> b,
                   std::initializer_list<double> c) {
  LinearProgram lp;
  lp.A.resize(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (const auto& row : a) {
    Eigen::Index j = 0;
    for (double v : row) lp.A(i, j++) = v;
    ++i;
  }
  lp.b = Eigen::Map<const Eigen::VectorXd>(b.begin(), static_cast<Eigen::Index>(b.size()));
  lp.c = Eigen::Map<const Eigen::VectorXd>(c.begin(), static_cast<Eigen::Index>(c.size()));
  return lp;
}

void expect_certified(const LinearProgram& lp, const LpSolution& s) {
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(lp.b.dot(s.y), s.objective, 1e-9);
  EXPECT_NEAR(lp.c.dot(s.x), s.objective, 1e-9);
  EXPECT_TRUE(((lp.A * s.x - lp.b).array() <= 1e-9).all());
  EXPECT_TRUE((s.x.array() >= -1e-12).all());
  EXPECT_TRUE((s.y.array() >= -1e-12).all());
  EXPECT_TRUE(((lp.A.transpose() * s.y - lp.c).array() >= -1e-9).all());
}

TEST(Simplex, TextbookMaximum) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
  auto lp = make({{1, 0}, {0, 2}, {3, 2}}, {4, 12, 18}, {3, 5});
  auto s = solve_lp(lp);
  expect_certified(lp, s);
  EXPECT_NEAR(s.objective, 36.0, 1e-12);
  EXPECT_NEAR(s.x(0), 2.0, 1e-12);
  EXPECT_NEAR(s.x(1), 6.0, 1e-12);
  EXPECT_NEAR(s.y(0), 0.0, 1e-12);
  EXPECT_NEAR(s.y(1), 1.5, 1e-12);
  EXPECT_NEAR(s.y(2), 1.0, 1e-12);
}

TEST(Simplex, NegativeRightHandSideNeedsPhaseOne) {
  // max -x - y, x + y >= 2, x <= 3 -> -2
  auto lp = make({{-1, -1}, {1, 0}}, {-2, 3}, {-1, -1});
  auto s = solve_lp(lp);
  expect_certified(lp, s);
  EXPECT_NEAR(s.objective, -2.0, 1e-12);
}

TEST(Simplex, DegenerateBealeExampleTerminates) {
  // Cycles under the largest-coefficient rule; Bland's rule terminates.
  auto lp = make({{0.25, -8, -1, 9}, {0.5, -12, -0.5, 3}, {0, 0, 1, 0}}, {0, 0, 1}, {0.75, -20, 0.5, -6});
  auto s = solve_lp(lp);
  expect_certified(lp, s);
  EXPECT_NEAR(s.objective, 1.25, 1e-12);
}

TEST(Simplex, DetectsInfeasibleAndUnbounded) {
  EXPECT_EQ(solve_lp(make({{1}, {-1}}, {1, -2}, {1})).status, LpStatus::kInfeasible);
  EXPECT_EQ(solve_lp(make({{-1, 1}}, {1}, {1, 0})).status, LpStatus::kUnbounded);
}

TEST(Simplex, RandomBoxedProgramsMatchVertexEnumeration) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int vars = 2 + trial % 3;
    const int rows = 3 + trial % 4;
    LinearProgram lp;
    lp.A.resize(rows + vars, vars);
    lp.b.resize(rows + vars);
    lp.c.resize(vars);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < vars; ++j) lp.A(i, j) = u(rng);
      lp.b(i) = u(rng) + 0.5;
    }
    lp.A.bottomRows(vars) = Eigen::MatrixXd::Identity(vars, vars);
    lp.b.tail(vars).setConstant(2.0);
    for (int j = 0; j < vars; ++j) lp.c(j) = u(rng);

    // Oracle on {A z <= b, -z <= 0}, minimizing -c.z.
    Eigen::MatrixXd a(rows + 2 * vars, vars);
    Eigen::VectorXd b(rows + 2 * vars);
    a << lp.A, -Eigen::MatrixXd::Identity(vars, vars);
    b << lp.b, Eigen::VectorXd::Zero(vars);
    double expected = -oracle::vertex_enumeration_min(a, b, -lp.c);

    auto s = solve_lp(lp);
    if (!std::isfinite(expected)) {
      EXPECT_EQ(s.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    expect_certified(lp, s);
    EXPECT_NEAR(s.objective, expected, 1e-9) << "trial " << trial;
  }
}

}  // namespace
}  // namespace advcert
