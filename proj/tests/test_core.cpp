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
#include <set>

#include <gtest/gtest.h>

#include "advcert/core.hpp"
#include "oracles.hpp"

namespace advcert {
namespace {

TEST(InputDomain, RankRoundTrip) {
  InputDomain dom(3, 3);
  EXPECT_EQ(dom.size(), 27u);
  for (std::uint64_t r = 0; r < dom.size(); ++r) EXPECT_EQ(dom.rank(dom.word(r)), r);
  EXPECT_EQ(dom.word(5), (Word{0, 1, 2}));
}

TEST(InputDomain, CapIsConfigurable) {
  EXPECT_THROW(InputDomain(13, 2), EnumerationOverflow);
  Limits big;
  big.max_strings = std::size_t{1} << 13;
  EXPECT_EQ(InputDomain(13, 2, big).size(), 8192u);
  EXPECT_THROW(InputDomain(0, 2), std::invalid_argument);
  EXPECT_THROW(InputDomain(2, 1), std::invalid_argument);
}

TEST(EnumerateAssignments, Counts) {
  EXPECT_EQ(enumerate_assignments(InputDomain(2, 2), 1).size(), 5u);
  EXPECT_EQ(enumerate_assignments(InputDomain(2, 2), 2).size(), 9u);
  EXPECT_EQ(enumerate_assignments(InputDomain(3, 3), 1).size(), 10u);
  for (int n = 1; n <= 4; ++n)
    for (int q = 2; q <= 3; ++q)
      for (int k = 0; k <= n; ++k)
        EXPECT_EQ(enumerate_assignments(InputDomain(n, q), k).size(), count_assignments(InputDomain(n, q), k));
}

TEST(EnumerateAssignments, CanonicalOrder) {
  auto all = enumerate_assignments(InputDomain(3, 2), 2);
  EXPECT_EQ(all[0].weight(), 0);
  EXPECT_EQ(all[1], (Assignment{{0, 0}}));
  EXPECT_EQ(all[2], (Assignment{{0, 1}}));
  EXPECT_EQ(all[3], (Assignment{{1, 0}}));
  EXPECT_EQ(all[7], (Assignment{{0, 0}, {1, 0}}));
  EXPECT_EQ(all[8], (Assignment{{0, 0}, {1, 1}}));
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_TRUE(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST(EnumerateAssignments, MatchesNaiveGenerator) {
  for (int n = 1; n <= 4; ++n) {
    for (int q = 2; q <= 3; ++q) {
      for (int k = 0; k <= n; ++k) {
        std::set<std::vector<std::pair<int, int>>> expected;
        std::vector<std::pair<int, int>> cur;
        oracle::naive_assignments(n, q, k, 0, cur, expected);
        auto got = enumerate_assignments(InputDomain(n, q), k);
        std::set<std::vector<std::pair<int, int>>> seen;
        for (const auto& a : got) seen.insert(a.entries());
        EXPECT_EQ(seen.size(), got.size());
        EXPECT_EQ(seen, expected) << "n=" << n << " q=" << q << " k=" << k;
        EXPECT_EQ(got, enumerate_assignments(InputDomain(n, q), k));
      }
    }
  }
}

TEST(EnumerateAssignments, OverflowNamesCount) {
  Limits tight;
  tight.max_assignments = 8;
  try {
    enumerate_assignments(InputDomain(2, 2), 2, tight);
    FAIL() << "expected overflow";
  } catch (const EnumerationOverflow& e) {
    EXPECT_EQ(e.count(), 9u);
    EXPECT_NE(std::string(e.what()).find('9'), std::string::npos);
  }
  EXPECT_THROW(enumerate_assignments(InputDomain(2, 2), 3), std::invalid_argument);
}

TEST(Assignment, Basics) {
  EXPECT_THROW((Assignment{{0, 1}, {0, 0}}), std::invalid_argument);
  Assignment a{{2, 1}, {0, 0}};
  EXPECT_EQ(a.to_string(), "{1->0, 3->1}");
  EXPECT_TRUE(a.defined_on(2));
  EXPECT_FALSE(a.defined_on(1));
  EXPECT_FALSE(a.merge(Assignment{{0, 1}}).has_value());
  EXPECT_EQ(*a.merge(Assignment{{1, 1}, {0, 0}}), (Assignment{{0, 0}, {1, 1}, {2, 1}}));
  EXPECT_TRUE(a.valid_for(InputDomain(3, 2)));
  EXPECT_FALSE(a.valid_for(InputDomain(2, 2)));
}

TEST(Agrees, Examples) {
  Word x{0, 1};
  EXPECT_TRUE(agrees(x, Assignment{{0, 0}}));
  EXPECT_TRUE(agrees(x, Assignment{}));
  EXPECT_FALSE(agrees(x, Assignment{{1, 0}}));
}

TEST(Marginal, Examples) {
  Measure mu = Measure::uniform({{0, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(marginal(mu, Assignment{{0, 0}}), 0.5);
  EXPECT_DOUBLE_EQ(marginal(mu, Assignment{}), 1.0);
  EXPECT_DOUBLE_EQ(marginal(mu, Assignment{{0, 0}, {1, 1}}), 0.0);
}

Measure random_measure(const InputDomain& dom, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Word> support;
  std::vector<double> w;
  for (const auto& x : dom.all_words()) {
    if (u(rng) < 0.6) {
      support.push_back(x);
      w.push_back(u(rng));
    }
  }
  if (support.empty()) {
    support.push_back(dom.word(0));
    w.push_back(1.0);
  }
  Measure m(support, w);
  return m.scaled(1.0 / m.total());
}

TEST(Marginal, Properties) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    InputDomain dom(3, 2 + trial % 2);
    Measure mu = random_measure(dom, rng);
    auto all = enumerate_assignments(dom, dom.n());
    for (const auto& a : all) {
      for (int i = 0; i < dom.n(); ++i) {
        if (a.defined_on(i)) continue;
        double split = 0.0;
        for (int s = 0; s < dom.q(); ++s) {
          double m = marginal(mu, a.with(i, s));
          EXPECT_LE(m, marginal(mu, a) + 1e-15);
          split += m;
        }
        EXPECT_NEAR(split, marginal(mu, a), 1e-12);
      }
    }
    // For a fixed index set, the symbol choices partition the mass.
    for (int k = 0; k <= dom.n(); ++k) {
      for (const auto& idx : index_sets(dom.n(), k)) {
        double total = 0.0;
        for (const auto& a : assignments_of_weight(dom, k)) {
          bool same = a.weight() == k;
          for (int t = 0; same && t < k; ++t) same = a.entries()[static_cast<std::size_t>(t)].first == idx[static_cast<std::size_t>(t)];
          if (same) total += marginal(mu, a);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
      }
    }
  }
}

TEST(Measure, Validation) {
  EXPECT_THROW(Measure({{0}}, {-0.1}), std::invalid_argument);
  EXPECT_THROW(Measure({{0}, {0}}, {0.5, 0.5}), std::invalid_argument);
  Measure mu({{1, 1}, {0, 0}}, {0.25, 0.75});
  EXPECT_EQ(mu.support().front(), (Word{0, 0}));
  EXPECT_DOUBLE_EQ(mu.weight_of(Word{1, 1}), 0.25);
  EXPECT_DOUBLE_EQ(mu.weight_of(Word{1, 0}), 0.0);
  EXPECT_TRUE(mu.is_probability());
  EXPECT_FALSE(mu.scaled(2.0).is_probability());
}

TEST(PartialFunction, Invariants) {
  InputDomain dom(2, 2);
  EXPECT_THROW(PartialFunction(dom, {{0, 1}}, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(PartialFunction(dom, {{0, 2}}, {}), std::invalid_argument);
  PartialFunction f(dom, {{1, 1}}, {{0, 0}});
  EXPECT_FALSE(f.is_total());
  EXPECT_EQ(f.value(Word{1, 1}), 1);
  EXPECT_EQ(f.value(Word{0, 0}), 0);
  EXPECT_FALSE(f.value(Word{0, 1}).has_value());
  PartialFunction g(dom, {{0, 1}, {1, 0}, {1, 1}}, {{0, 0}});
  EXPECT_TRUE(g.is_total());
}

}  // namespace
}  // namespace advcert
