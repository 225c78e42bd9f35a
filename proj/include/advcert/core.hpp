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

// Input domains [q]^n, assignments, measures and partial functions.
//
// Strings are digit vectors over {0, ..., q-1} with coordinate 0 as the most
// significant digit, so lexicographic order on digit vectors coincides with
// the base-q rank. Every dense matrix in the library is indexed in that order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advcert/config.hpp"

namespace advcert {

using Word = std::vector<int>;

class InputDomain {
 public:
  InputDomain(int n, int q, const Limits& limits = {}) : n_(n), q_(q) {
    if (n < 1) throw std::invalid_argument("arity n must be positive");
    if (q < 2) throw std::invalid_argument("alphabet size q must be at least 2");
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) {
      if (count > limits.max_strings / static_cast<std::size_t>(q)) {
        throw EnumerationOverflow("domain size q^n", saturating_pow(q, n));
      }
      count *= static_cast<std::size_t>(q);
    }
    size_ = count;
  }

  int n() const { return n_; }
  int q() const { return q_; }
  std::size_t size() const { return size_; }
  bool is_boolean() const { return q_ == 2; }

  bool contains(std::span<const int> x) const {
    if (static_cast<int>(x.size()) != n_) return false;
    return std::all_of(x.begin(), x.end(), [&](int s) { return s >= 0 && s < q_; });
  }

  std::uint64_t rank(std::span<const int> x) const {
    std::uint64_t r = 0;
    for (int s : x) r = r * static_cast<std::uint64_t>(q_) + static_cast<std::uint64_t>(s);
    return r;
  }

  Word word(std::uint64_t rank) const {
    Word x(static_cast<std::size_t>(n_));
    for (int i = n_ - 1; i >= 0; --i) {
      x[static_cast<std::size_t>(i)] = static_cast<int>(rank % static_cast<std::uint64_t>(q_));
      rank /= static_cast<std::uint64_t>(q_);
    }
    return x;
  }

  std::vector<Word> all_words() const {
    std::vector<Word> out;
    out.reserve(size_);
    for (std::uint64_t r = 0; r < size_; ++r) out.push_back(word(r));
    return out;
  }

  bool operator==(const InputDomain& o) const { return n_ == o.n_ && q_ == o.q_; }

 private:
  static std::size_t saturating_pow(int q, int n) {
    double v = std::pow(static_cast<double>(q), n);
    return v > 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(v);
  }

  int n_;
  int q_;
  std::size_t size_ = 0;
};

// Bitstring-style rendering; symbols >= 10 are comma separated.
inline std::string format_word(std::span<const int> x) {
  bool wide = std::any_of(x.begin(), x.end(), [](int s) { return s >= 10; });
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (wide && i > 0) out += ',';
    out += std::to_string(x[i]);
  }
  return out;
}

// A partial fixing of coordinates. Entries are kept sorted by index.
class Assignment {
 public:
  using Entry = std::pair<int, int>;  // (index, symbol), both 0-based

  Assignment() = default;
  explicit Assignment(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].first == entries_[i - 1].first) {
        throw std::invalid_argument("assignment fixes index " +
                                    std::to_string(entries_[i].first + 1) + " twice");
      }
    }
  }
  Assignment(std::initializer_list<Entry> entries) : Assignment(std::vector<Entry>(entries)) {}

  int weight() const { return static_cast<int>(entries_.size()); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool defined_on(int index) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return e.first == index; });
  }

  std::optional<int> at(int index) const {
    for (const auto& [i, s] : entries_)
      if (i == index) return s;
    return std::nullopt;
  }

  bool valid_for(const InputDomain& dom) const {
    return std::all_of(entries_.begin(), entries_.end(), [&](const Entry& e) {
      return e.first >= 0 && e.first < dom.n() && e.second >= 0 && e.second < dom.q();
    });
  }

  // Union of two assignments, or nullopt if they contradict each other.
  std::optional<Assignment> merge(const Assignment& other) const {
    std::vector<Entry> merged = entries_;
    for (const auto& [i, s] : other.entries_) {
      auto mine = at(i);
      if (mine && *mine != s) return std::nullopt;
      if (!mine) merged.emplace_back(i, s);
    }
    return Assignment(std::move(merged));
  }

  Assignment with(int index, int symbol) const {
    std::vector<Entry> e = entries_;
    e.emplace_back(index, symbol);
    return Assignment(std::move(e));
  }

  // Coordinates are printed 1-based, symbols 0-based: {1->0, 3->1}.
  std::string to_string() const {
    std::string out = "{";
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (k > 0) out += ", ";
      out += std::to_string(entries_[k].first + 1) + "->" + std::to_string(entries_[k].second);
    }
    return out + "}";
  }

  // Canonical enumeration order: weight, then index set, then symbol tuple.
  friend bool operator<(const Assignment& a, const Assignment& b) {
    if (a.weight() != b.weight()) return a.weight() < b.weight();
    for (int k = 0; k < a.weight(); ++k) {
      if (a.entries_[k].first != b.entries_[k].first) return a.entries_[k].first < b.entries_[k].first;
    }
    for (int k = 0; k < a.weight(); ++k) {
      if (a.entries_[k].second != b.entries_[k].second) return a.entries_[k].second < b.entries_[k].second;
    }
    return false;
  }
  friend bool operator==(const Assignment& a, const Assignment& b) = default;

 private:
  std::vector<Entry> entries_;
};

inline bool agrees(std::span<const int> x, const Assignment& a) {
  return std::all_of(a.entries().begin(), a.entries().end(), [&](const Assignment::Entry& e) {
    return static_cast<std::size_t>(e.first) < x.size() && x[static_cast<std::size_t>(e.first)] == e.second;
  });
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// Number of assignments of weight <= kmax: sum_k C(n,k) q^k.
inline std::size_t count_assignments(const InputDomain& dom, int kmax) {
  double total = 0.0;
  for (int k = 0; k <= kmax; ++k) total += binomial(dom.n(), k) * std::pow(dom.q(), k);
  return total > 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(total);
}

// Index sets of size exactly k in lexicographic order.
inline std::vector<std::vector<int>> index_sets(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> s(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++s[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

// All assignments of weight exactly k, in canonical order.
inline std::vector<Assignment> assignments_of_weight(const InputDomain& dom, int k) {
  std::vector<Assignment> out;
  for (const auto& idx : index_sets(dom.n(), k)) {
    std::vector<int> sym(static_cast<std::size_t>(k), 0);
    while (true) {
      std::vector<Assignment::Entry> e;
      e.reserve(static_cast<std::size_t>(k));
      for (int t = 0; t < k; ++t) e.emplace_back(idx[static_cast<std::size_t>(t)], sym[static_cast<std::size_t>(t)]);
      out.emplace_back(std::move(e));
      int t = k - 1;
      while (t >= 0 && sym[static_cast<std::size_t>(t)] == dom.q() - 1) sym[static_cast<std::size_t>(t--)] = 0;
      if (t < 0) break;
      ++sym[static_cast<std::size_t>(t)];
    }
  }
  return out;
}

inline std::vector<Assignment> enumerate_assignments(const InputDomain& dom, int kmax,
                                                     const Limits& limits = {}) {
  if (kmax < 0 || kmax > dom.n()) throw std::invalid_argument("kmax must lie in [0, n]");
  std::size_t count = count_assignments(dom, kmax);
  if (count > limits.max_assignments) throw EnumerationOverflow("assignment count", count);
  std::vector<Assignment> out;
  out.reserve(count);
  for (int k = 0; k <= kmax; ++k) {
    auto level = assignments_of_weight(dom, k);
    out.insert(out.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
  }
  return out;
}

// A non-negative measure on a finite set of strings, stored in rank order.
class Measure {
 public:
  Measure() = default;
  Measure(std::vector<Word> support, std::vector<double> weights) {
    if (support.size() != weights.size()) throw std::invalid_argument("support/weight size mismatch");
    std::vector<std::size_t> order(support.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
    for (std::size_t i : order) {
      if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
        throw std::invalid_argument("measure weight at " + format_word(support[i]) + " is negative or not finite");
      }
      if (!support_.empty() && support_.back() == support[i]) {
        throw std::invalid_argument("string " + format_word(support[i]) + " listed twice in measure");
      }
      support_.push_back(std::move(support[i]));
      weights_.push_back(weights[i]);
    }
  }

  static Measure uniform(std::vector<Word> support) {
    std::vector<double> w(support.size(), support.empty() ? 0.0 : 1.0 / static_cast<double>(support.size()));
    return Measure(std::move(support), std::move(w));
  }

  const std::vector<Word>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }
  bool empty() const { return support_.empty(); }

  double total() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }
  bool is_probability(double tol = 1e-12) const { return std::abs(total() - 1.0) <= tol; }

  double weight_of(std::span<const int> x) const {
    Word key(x.begin(), x.end());
    auto it = std::lower_bound(support_.begin(), support_.end(), key);
    if (it == support_.end() || *it != key) return 0.0;
    return weights_[static_cast<std::size_t>(it - support_.begin())];
  }

  Measure scaled(double c) const {
    Measure out = *this;
    for (double& w : out.weights_) w *= c;
    return out;
  }

 private:
  std::vector<Word> support_;
  std::vector<double> weights_;
};

// Pr_{x <- mu}[x ~ a] (for an unnormalized measure: the mass agreeing with a).
inline double marginal(const Measure& mu, const Assignment& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (agrees(mu.support()[i], a)) s += mu.weights()[i];
  return s;
}

// f : D -> {0,1} with D a subset of [q]^n; X = f^{-1}(1), Y = f^{-1}(0).
class PartialFunction {
 public:
  PartialFunction(InputDomain domain, std::vector<Word> x, std::vector<Word> y)
      : domain_(domain), x_(std::move(x)), y_(std::move(y)) {
    normalize(x_, "X");
    normalize(y_, "Y");
    std::vector<Word> common;
    std::set_intersection(x_.begin(), x_.end(), y_.begin(), y_.end(), std::back_inserter(common));
    if (!common.empty()) throw std::invalid_argument("string " + format_word(common.front()) + " is in both X and Y");
  }

  const InputDomain& domain() const { return domain_; }
  const std::vector<Word>& ones() const { return x_; }
  const std::vector<Word>& zeros() const { return y_; }
  bool is_total() const { return x_.size() + y_.size() == domain_.size(); }

  bool in_ones(std::span<const int> w) const { return std::binary_search(x_.begin(), x_.end(), Word(w.begin(), w.end())); }
  bool in_zeros(std::span<const int> w) const { return std::binary_search(y_.begin(), y_.end(), Word(w.begin(), w.end())); }

  std::optional<int> value(std::span<const int> w) const {
    if (in_ones(w)) return 1;
    if (in_zeros(w)) return 0;
    return std::nullopt;
  }

 private:
  void normalize(std::vector<Word>& set, const char* name) const {
    for (const auto& w : set)
      if (!domain_.contains(w)) throw std::invalid_argument(std::string(name) + " contains a string outside [q]^n: " + format_word(w));
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }

  InputDomain domain_;
  std::vector<Word> x_;
  std::vector<Word> y_;
};

}  // namespace advcert
