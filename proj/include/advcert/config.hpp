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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace advcert {

// Numerical tolerances shared by every module. All of them can be overridden
// from the command line (--tol-*).
struct Tolerances {
  double feasibility = 1e-8;    // simplex primal/dual feasibility
  double duality_gap = 1e-7;    // |primal - dual| on solved LPs
  double dual_validity = 1e-9;  // orthogonality / normalization of duals
  double gram = 1e-10;          // Gram matching and marginal matching
  double projector = 1e-9;      // projector identities (idempotence, nesting)
  double rank = 1e-10;          // relative eigenvalue cutoff for spans
  double norm = 1e-7;           // spectral norm identities
  double isometry = 1e-8;       // W^T W and W W^T against the projectors
  double entrywise = 1e-12;     // entrywise identities such as Delta_j o W' = 0
  double zero = 1e-14;          // |phi(x)| below this counts as phi(x) = 0
};

// Size caps that keep every dense matrix desk-sized.
struct Limits {
  std::size_t max_strings = std::size_t{1} << 12;
  std::size_t max_assignments = std::size_t{1} << 16;
  // Above this dimension spectral norms switch to power iteration.
  std::size_t dense_norm_dim = 2048;
};

struct Config {
  Tolerances tol;
  Limits limits;
  double dual_threshold = 1.0 / 3.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

// Base class for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnumerationOverflow : public Error {
 public:
  EnumerationOverflow(const std::string& what, std::size_t count)
      : Error(what + ": " + std::to_string(count) + " exceeds the configured cap"),
        count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

class BooleanOnly : public Error {
 public:
  BooleanOnly() : Error("operation requires a Boolean alphabet (q = 2)") {}
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class TrivialFunction : public Error {
 public:
  using Error::Error;
};

class InvalidDual : public Error {
 public:
  using Error::Error;
};

class GramMismatch : public Error {
 public:
  using Error::Error;
};

class LevelTooLarge : public Error {
 public:
  LevelTooLarge(const std::string& what, int supported)
      : Error(what), supported_(supported) {}
  // Largest level at which the Gram hypothesis still holds (-1 if none).
  int supported() const { return supported_; }

 private:
  int supported_;
};

class MarginalMismatch : public Error {
 public:
  MarginalMismatch(const std::string& assignment, double deviation)
      : Error("marginals differ at assignment " + assignment + " (deviation " +
              std::to_string(deviation) + ")"),
        assignment_(assignment),
        deviation_(deviation) {}
  const std::string& assignment() const { return assignment_; }
  double deviation() const { return deviation_; }

 private:
  std::string assignment_;
  double deviation_;
};

class PromiseViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace advcert
