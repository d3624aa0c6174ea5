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

#include "adacache/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "adacache/errors.hpp"

namespace adacache {

const char* to_string(PatternLabel label) {
  switch (label) {
    case PatternLabel::sequential:
      return "sequential";
    case PatternLabel::random:
      return "random";
    case PatternLabel::skewed:
      return "skewed";
  }
  return "?";
}

SpatialGaps spatial_gaps(std::span<const WindowEntry> window) {
  if (window.size() < 2) {
    throw InsufficientDataError("spatial gaps need at least two window entries, got " +
                                std::to_string(window.size()));
  }
  SpatialGaps out;
  out.pair_count = window.size() - 1;
  out.gaps.reserve(out.pair_count);
  for (std::size_t i = 1; i < window.size(); ++i) {
    const std::int64_t delta = window[i].index - window[i - 1].index;
    if (delta == 0) {
      ++out.repeats;
    } else {
      out.gaps.push_back(static_cast<std::uint64_t>(std::llabs(delta)));
    }
  }
  return out;
}

bool detect_sequential(std::span<const std::uint64_t> gaps, const RecognizerConfig& config) {
  if (gaps.empty()) {
    return false;
  }
  const auto ones = static_cast<std::size_t>(std::count(gaps.begin(), gaps.end(), 1ULL));
  return static_cast<double>(ones) >=
         config.sequential_fraction_threshold * static_cast<double>(gaps.size());
}

double triangular_cdf(std::uint64_t k, std::uint64_t c) {
  if (c < 2 || k < 1 || k > c - 1) {
    throw DomainError("triangular_cdf: k=" + std::to_string(k) + " outside [1, c-1] for c=" +
                      std::to_string(c));
  }
  const auto kd = static_cast<double>(k);
  const auto cd = static_cast<double>(c);
  return 2.0 * kd / (cd - 1.0) - kd * (kd + 1.0) / (cd * (cd - 1.0));
}

double ks_critical_coefficient(double alpha) {
  struct Entry {
    double alpha;
    double coeff;
  };
  // Standard large-sample table; the closed form below reproduces it to
  // three decimals for other levels.
  static constexpr Entry kTable[] = {
      {0.10, 1.224}, {0.05, 1.358}, {0.025, 1.480},
      {0.01, 1.628}, {0.005, 1.731}, {0.001, 1.949},
  };
  for (const auto& entry : kTable) {
    if (std::abs(alpha - entry.alpha) < 1e-12) {
      return entry.coeff;
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("significance level must lie in (0,1)");
  }
  return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

KsTestResult ks_test_random(std::span<const std::uint64_t> gaps, std::uint64_t c,
                            const RecognizerConfig& config) {
  if (gaps.size() < 2) {
    throw InsufficientDataError("K-S test needs at least two gap samples, got " +
                                std::to_string(gaps.size()));
  }
  if (c < 2) {
    throw DomainError("K-S reference needs c >= 2");
  }
  std::vector<std::uint64_t> sorted(gaps.begin(), gaps.end());
  std::sort(sorted.begin(), sorted.end());

  const auto n = static_cast<double>(sorted.size());
  // Reference CDF clamped to its support so that out-of-range samples (an
  // underestimated c) still yield a defined statistic.
  const auto ref = [&](std::uint64_t k) {
    if (k < 1) return 0.0;
    if (k >= c - 1) return 1.0;
    return triangular_cdf(k, c);
  };

  double d_max = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) {
      ++j;
    }
    const double f = ref(sorted[i]);
    const double ecdf_hi = static_cast<double>(j) / n;
    const double ecdf_lo = static_cast<double>(i) / n;
    d_max = std::max({d_max, ecdf_hi - f, f - ecdf_lo});
    i = j;
  }

  KsTestResult result;
  result.d_max = d_max;
  result.d_alpha = ks_critical_coefficient(config.alpha) / std::sqrt(n);
  result.sample_count = sorted.size();
  result.alpha = config.alpha;
  result.reject_null = d_max >= result.d_alpha;
  result.c = c;
  return result;
}

PatternLabel classify(std::span<const WindowEntry> window, std::uint64_t c,
                      const RecognizerConfig& config) {
  const SpatialGaps analysis = spatial_gaps(window);
  if (!analysis.gaps.empty() && detect_sequential(analysis.gaps, config)) {
    return PatternLabel::sequential;
  }
  // The random reference excludes repeats; a repeat-heavy window cannot be a
  // per-epoch permutation.
  if (analysis.repeat_fraction() > config.repeat_skew_fraction) {
    return PatternLabel::skewed;
  }
  if (c < config.min_random_c || analysis.gaps.size() < 2) {
    return PatternLabel::skewed;
  }
  const KsTestResult ks = ks_test_random(analysis.gaps, c, config);
  return ks.reject_null ? PatternLabel::skewed : PatternLabel::random;
}

}  // namespace adacache
