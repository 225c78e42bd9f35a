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

// Dense two-phase tableau simplex with Bland's rule.
//
//   maximize  c.x   subject to  A x <= b,  x >= 0
//
// Row duals y >= 0 (the multipliers of A x <= b) are read off the reduced
// costs of the slack columns at the optimal basis, so that b.y = c.x holds at
// optimality and A^T y >= c.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "advcert/config.hpp"

namespace advcert {

struct LinearProgram {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  int iterations = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, double tol) : tol_(tol) {
    rows_ = static_cast<int>(lp.A.rows());
    vars_ = static_cast<int>(lp.A.cols());
    sign_ = Eigen::VectorXd::Ones(rows_);
    for (int i = 0; i < rows_; ++i)
      if (lp.b(i) < 0) {
        sign_(i) = -1.0;
        ++arts_;
      }
    cols_ = vars_ + rows_ + arts_;
    t_ = Eigen::MatrixXd::Zero(rows_ + 1, cols_ + 1);
    basis_.assign(static_cast<std::size_t>(rows_), -1);
    int a = 0;
    for (int i = 0; i < rows_; ++i) {
      double sign = sign_(i);
      t_.row(i).head(vars_) = sign * lp.A.row(i);
      t_(i, vars_ + i) = sign;
      t_(i, cols_) = sign * lp.b(i);
      if (sign < 0) {
        t_(i, vars_ + rows_ + a) = 1.0;
        basis_[static_cast<std::size_t>(i)] = vars_ + rows_ + a;
        ++a;
      } else {
        basis_[static_cast<std::size_t>(i)] = vars_ + i;
      }
    }
  }

  // Returns false if phase one proves infeasibility.
  bool phase_one(int& iterations, int max_iter, bool& hit_limit) {
    if (arts_ == 0) return true;
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
    cost.tail(arts_).setConstant(-1.0);
    set_objective(cost);
    if (!optimize(cols_, iterations, max_iter, hit_limit)) return false;  // cannot be unbounded
    if (hit_limit) return false;
    if (t_(rows_, cols_) < -tol_ * std::max(1.0, t_.col(cols_).head(rows_).cwiseAbs().maxCoeff())) return false;
    // Pivot zero-level artificials out of the basis where possible.
    for (int i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < vars_ + rows_) continue;
      for (int j = 0; j < vars_ + rows_; ++j) {
        if (std::abs(t_(i, j)) > tol_) {
          pivot(i, j);
          break;
        }
      }
    }
    return true;
  }

  // Returns false if the objective is unbounded.
  bool phase_two(const Eigen::VectorXd& c, int& iterations, int max_iter, bool& hit_limit) {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
    cost.head(vars_) = c;
    set_objective(cost);
    return optimize(vars_ + rows_, iterations, max_iter, hit_limit);
  }

  double objective() const { return t_(rows_, cols_); }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(vars_);
    for (int i = 0; i < rows_; ++i) {
      int j = basis_[static_cast<std::size_t>(i)];
      if (j < vars_) x(j) = t_(i, cols_);
    }
    return x;
  }

  // A flipped row negates both its slack column and its dual, so the reduced
  // cost is the original multiplier either way.
  Eigen::VectorXd duals() const { return t_.row(rows_).segment(vars_, rows_).transpose(); }

 private:
  void set_objective(const Eigen::VectorXd& cost) {
    t_.row(rows_).setZero();
    for (int j = 0; j <= cols_; ++j) {
      double s = 0.0;
      for (int i = 0; i < rows_; ++i) s += cost(basis_[static_cast<std::size_t>(i)]) * t_(i, j);
      t_(rows_, j) = s - (j < cols_ ? cost(j) : 0.0);
    }
  }

  // Bland's rule: smallest eligible entering index, ties in the ratio test
  // broken by smallest basic index. Only columns < allowed may enter.
  bool optimize(int allowed, int& iterations, int max_iter, bool& hit_limit) {
    while (true) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        if (t_(rows_, j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      if (iterations >= max_iter) {
        hit_limit = true;
        return true;
      }
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows_; ++i) {
        double a = t_(i, enter);
        if (a <= tol_) continue;
        double ratio = t_(i, cols_) / a;
        if (leave < 0 || ratio < best - tol_) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + tol_ &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      ++iterations;
    }
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  double tol_;
  int rows_ = 0;
  int vars_ = 0;
  int arts_ = 0;
  int cols_ = 0;
  std::vector<int> basis_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd sign_;
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-9, int max_iter = 200000) {
  if (lp.A.rows() != lp.b.size() || lp.A.cols() != lp.c.size()) {
    throw std::invalid_argument("linear program dimensions do not match");
  }
  LpSolution out;
  detail::Tableau tab(lp, tol);
  bool hit_limit = false;
  if (!tab.phase_one(out.iterations, max_iter, hit_limit)) {
    out.status = hit_limit ? LpStatus::kIterationLimit : LpStatus::kInfeasible;
    return out;
  }
  if (!tab.phase_two(lp.c, out.iterations, max_iter, hit_limit)) {
    out.status = LpStatus::kUnbounded;
    return out;
  }
  if (hit_limit) {
    out.status = LpStatus::kIterationLimit;
    return out;
  }
  out.status = LpStatus::kOptimal;
  out.objective = tab.objective();
  out.x = tab.primal();
  out.y = tab.duals();
  return out;
}

}  // namespace advcert
