// Copyright (c) 2026 The adacache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "adacache/errors.hpp"
#include "adacache/pattern.hpp"
#include "test_support.hpp"

using namespace adacache;
using namespace adacache::test;

namespace {

std::vector<WindowEntry> window_of(std::initializer_list<std::int64_t> indices) {
  std::vector<WindowEntry> window;
  std::int64_t ts = 0;
  for (const auto index : indices) {
    window.push_back({index, ts++});
  }
  return window;
}

}  // namespace

TEST_CASE("spatial gaps: absolute differences, repeats counted separately") {
  const auto run = window_of({0, 1, 2, 3});
  CHECK(spatial_gaps(run).gaps == std::vector<std::uint64_t>{1, 1, 1});

  const auto jumps = window_of({5, 2, 9});
  CHECK(spatial_gaps(jumps).gaps == std::vector<std::uint64_t>{3, 7});

  const auto repeated = window_of({4, 4, 6});
  const auto analysis = spatial_gaps(repeated);
  CHECK(analysis.gaps == std::vector<std::uint64_t>{2});
  CHECK(analysis.repeats == 1);
  CHECK(analysis.pair_count == 2);

  CHECK_THROWS_AS(spatial_gaps(window_of({1})), InsufficientDataError);
}

TEST_CASE("sequential detection thresholds") {
  RecognizerConfig config;
  std::vector<std::uint64_t> all_ones(100, 1);
  CHECK(detect_sequential(all_ones, config));

  std::vector<std::uint64_t> mostly_ones(95, 1);
  for (int i = 0; i < 5; ++i) {
    mostly_ones.push_back(137);
  }
  CHECK(detect_sequential(mostly_ones, config));

  // Gaps from uniform permutations are essentially never 90% ones.
  Rng rng(11);
  int sequential_votes = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto window = permutation_window(1000, 100, rng);
    const auto gaps = spatial_gaps(window).gaps;
    if (detect_sequential(gaps, config)) {
      ++sequential_votes;
    }
  }
  CHECK(sequential_votes == 0);
}

TEST_CASE("triangular CDF matches brute-force enumeration") {
  for (std::uint64_t c = 2; c <= 64; ++c) {
    const auto pmf = brute_force_gap_pmf(c);
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= c - 1; ++k) {
      acc += pmf[k];
      CHECK(std::abs(triangular_cdf(k, c) - acc) < 1e-12);
    }
    CHECK(triangular_cdf(c - 1, c) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(triangular_cdf(1, 100) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(triangular_cdf(2, 4) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  CHECK_THROWS_AS(triangular_cdf(0, 10), DomainError);
  CHECK_THROWS_AS(triangular_cdf(10, 10), DomainError);
  CHECK_THROWS_AS(triangular_cdf(1, 1), DomainError);
}

TEST_CASE("K-S critical values") {
  CHECK(ks_critical_coefficient(0.01) == doctest::Approx(1.628));
  CHECK(ks_critical_coefficient(0.05) == doctest::Approx(1.358));
  // Closed form stays close to the table for nearby levels.
  CHECK(ks_critical_coefficient(0.02) ==
        doctest::Approx(std::sqrt(-std::log(0.01) / 2.0)).epsilon(1e-9));
}

TEST_CASE("K-S test statistic and verdicts") {
  RecognizerConfig config;

  SUBCASE("threshold at n=100, alpha=0.01") {
    std::vector<std::uint64_t> gaps(100);
    Rng rng(3);
    const auto cdf = triangular_cdf_table(1000);
    for (auto& gap : gaps) {
      gap = triangular_gap_sample(cdf, rng);
    }
    const auto result = ks_test_random(gaps, 1000, config);
    CHECK(result.d_alpha == doctest::Approx(0.1628).epsilon(1e-3));
    CHECK(result.sample_count == 100);
  }

  SUBCASE("all-ones sample against c=1000 is rejected") {
    const std::vector<std::uint64_t> gaps(100, 1);
    const auto result = ks_test_random(gaps, 1000, config);
    CHECK(result.d_max >= 0.998);
    CHECK(result.reject_null);
  }

  SUBCASE("insufficient samples") {
    const std::vector<std::uint64_t> gaps{1};
    CHECK_THROWS_AS(ks_test_random(gaps, 100, config), InsufficientDataError);
  }

  SUBCASE("true triangular samples are mostly accepted") {
    Rng rng(17);
    const auto cdf = triangular_cdf_table(1000);
    int accepted = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<std::uint64_t> gaps(100);
      for (auto& gap : gaps) {
        gap = triangular_gap_sample(cdf, rng);
      }
      if (!ks_test_random(gaps, 1000, config).reject_null) {
        ++accepted;
      }
    }
    CHECK(accepted >= trials * 98 / 100);
  }

  SUBCASE("raising alpha can only move accept toward reject") {
    Rng rng(23);
    const auto cdf = triangular_cdf_table(500);
    RecognizerConfig strict = config;   // alpha 0.01
    RecognizerConfig loose = config;
    loose.alpha = 0.05;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::uint64_t> gaps(60);
      for (auto& gap : gaps) {
        gap = triangular_gap_sample(cdf, rng);
      }
      const auto at_001 = ks_test_random(gaps, 500, strict);
      const auto at_005 = ks_test_random(gaps, 500, loose);
      CHECK(at_005.d_alpha < at_001.d_alpha);
      if (at_001.reject_null) {
        CHECK(at_005.reject_null);
      }
    }
  }
}

TEST_CASE("classify: order of checks and labels") {
  RecognizerConfig config;

  SUBCASE("catalog-order accesses are sequential, never K-S tested") {
    // With c=2 the triangular reference would put all mass at gap 1 and the
    // K-S path would accept; the sequential check must win first.
    std::vector<WindowEntry> window;
    for (int i = 0; i < 100; ++i) {
      window.push_back({i, i});
    }
    CHECK(classify(window, 1000, config) == PatternLabel::sequential);
    CHECK(classify(window, 1000, config) == PatternLabel::sequential);  // pure
  }

  SUBCASE("permutation windows are random") {
    Rng rng(5);
    int correct = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto window = permutation_window(1000, 100, rng);
      if (classify(window, 1000, config) == PatternLabel::random) {
        ++correct;
      }
    }
    CHECK(correct >= 95);
  }

  SUBCASE("Zipf windows are skewed") {
    Rng rng(6);
    int correct = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto window = zipf_window(1000, 1.0, 100, rng);
      if (classify(window, 1000, config) == PatternLabel::skewed) {
        ++correct;
      }
    }
    CHECK(correct >= 90);
  }

  SUBCASE("repeat-heavy windows short-circuit to skewed") {
    std::vector<WindowEntry> window;
    for (int i = 0; i < 100; ++i) {
      window.push_back({(i / 4) * 37 % 997, i});  // 75% repeats
    }
    CHECK(classify(window, 1000, config) == PatternLabel::skewed);
  }

  SUBCASE("tiny datasets skip the triangular test") {
    Rng rng(8);
    const auto window = permutation_window(8, 8, rng);
    CHECK(classify(window, 8, config) == PatternLabel::skewed);
  }
}
