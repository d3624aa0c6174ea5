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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adacache {

enum class PatternLabel { sequential, random, skewed };

const char* to_string(PatternLabel label);

struct RecognizerConfig {
  double alpha = 0.01;
  double sequential_fraction_threshold = 0.9;
  // Repeats are excluded from the gap samples; if they dominate the window
  // the stream is treated as skewed outright.
  double repeat_skew_fraction = 0.1;
  // Below this dataset size the triangular reference is too coarse for a
  // meaningful test and non-sequential streams are labeled skewed.
  std::uint64_t min_random_c = 10;
};

/// One observation-window entry: the child's sequential element number and
/// the access timestamp.
struct WindowEntry {
  std::int64_t index = 0;
  std::int64_t ts_ms = 0;

  bool operator==(const WindowEntry&) const = default;
};

/// Spatial gaps of consecutive window entries. Exact repeats (gap 0) are
/// excluded from `gaps` and counted in `repeats`.
struct SpatialGaps {
  std::vector<std::uint64_t> gaps;
  std::size_t repeats = 0;
  std::size_t pair_count = 0;

  double repeat_fraction() const {
    return pair_count == 0 ? 0.0 : static_cast<double>(repeats) / static_cast<double>(pair_count);
  }
};

/// Absolute index differences of consecutive entries. Throws
/// InsufficientDataError for windows with fewer than two entries.
SpatialGaps spatial_gaps(std::span<const WindowEntry> window);

/// True when the fraction of unit gaps reaches the sequential threshold.
bool detect_sequential(std::span<const std::uint64_t> gaps, const RecognizerConfig& config);

/// CDF of the spatial-gap reference distribution for uniform random access
/// without replacement over c items:
///
///   F(k) = 2k/(c-1) - k(k+1)/(c(c-1)),   1 <= k <= c-1
///
/// Throws DomainError outside that range.
double triangular_cdf(std::uint64_t k, std::uint64_t c);

/// Critical-value coefficient for the two-sided one-sample test at level
/// alpha; table values for common levels, asymptotic formula otherwise.
double ks_critical_coefficient(double alpha);

struct KsTestResult {
  double d_max = 0.0;
  double d_alpha = 0.0;
  std::size_t sample_count = 0;
  double alpha = 0.0;
  bool reject_null = false;
  std::uint64_t c = 0;
};

/// One-sample Kolmogorov-Smirnov test of the gap samples against the
/// triangular reference with dataset size c. Both one-sided deviations are
/// evaluated at each distinct sample value. The null (random access) is
/// rejected iff d_max >= d_alpha with d_alpha = coeff(alpha)/sqrt(n).
/// Throws InsufficientDataError for fewer than two samples.
KsTestResult ks_test_random(std::span<const std::uint64_t> gaps, std::uint64_t c,
                            const RecognizerConfig& config);

/// Maps a window snapshot to a pattern. The sequential check strictly
/// precedes the K-S test; the K-S null maps to random, anything else to
/// skewed. c is the dataset item count of the stream. Degenerate inputs
/// (c below min_random_c, repeat-heavy windows, fewer than two usable gaps)
/// resolve to skewed without testing.
PatternLabel classify(std::span<const WindowEntry> window, std::uint64_t c,
                      const RecognizerConfig& config);

}  // namespace adacache
