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
#include <optional>
#include <string>
#include <vector>

#include "adacache/pattern.hpp"

namespace adacache {

inline constexpr std::uint64_t kDefaultRoundBytes = 640ULL * 1024 * 1024;
inline constexpr std::uint64_t kDefaultMinShareBytes = 640ULL * 1024 * 1024;
inline constexpr std::int64_t kDefaultPeriodMs = 60000;

struct AllocatorConfig {
  std::uint64_t round_bytes = kDefaultRoundBytes;
  std::int64_t period_ms = kDefaultPeriodMs;
  std::uint64_t min_share_bytes = kDefaultMinShareBytes;
};

/// Marginal cache benefit of one unit: transmission reduced per unit time by
/// one more unit of cache space. Only the active pattern's inputs are set.
struct BenefitEstimate {
  std::string unit_id;
  PatternLabel pattern = PatternLabel::skewed;
  double benefit_per_s = 0.0;
  bool warming = false;

  std::optional<double> reuse_time_s;       // t (random)
  std::optional<double> mean_gap_s;         // g (random)
  std::optional<std::uint64_t> block_count; // n (random)
  std::optional<double> arrival_rate_per_s; // lambda (skewed)
  std::optional<double> ghost_hit_freq;     // f_BufferHit (skewed)
  std::uint64_t ghost_window = 0;           // w (skewed)
};

/// sequential: B = 0. Items of a one-shot scan are never re-read.
BenefitEstimate benefit_sequential(std::string unit_id);

/// random: t = g*n and B = 1/(g*n). Missing or zero inputs report B = 0 with
/// the warming flag.
BenefitEstimate benefit_random(std::string unit_id, std::optional<double> mean_gap_s,
                               std::uint64_t dataset_blocks);

/// skewed: B = lambda * f_BufferHit / w; warmed_up is false until ghost
/// statistics cover a full period.
BenefitEstimate benefit_skewed(std::string unit_id, double arrival_rate_per_s,
                               double ghost_hit_freq, std::uint64_t ghost_window, bool warmed_up);

struct QuotaTransfer {
  std::string from_unit;  // empty = free pool
  std::string to_unit;
  std::uint64_t bytes = 0;
};

struct AllocationRound {
  double at_ms = 0.0;
  std::vector<QuotaTransfer> transfers;
  std::uint64_t round_bytes = kDefaultRoundBytes;
  std::int64_t period_ms = kDefaultPeriodMs;
};

/// Quota/benefit view of one unit as seen by the allocator.
struct UnitAllocationState {
  std::string unit_id;
  std::uint64_t quota_bytes = 0;
  double benefit_per_s = 0.0;
};

/// One allocation round: free-pool bytes go to the highest-benefit unit
/// first (capped at round_bytes), then at most one donor-to-receiver shift
/// of min(round_bytes, donor slack above the minimum share) from the
/// lowest-benefit unit with slack to the highest-benefit unit. A shift
/// requires strictly higher receiver benefit; ties break by unit id. The
/// round only describes transfers; the caller applies them.
AllocationRound rebalance(const std::vector<UnitAllocationState>& units,
                          std::uint64_t free_pool_bytes, double now_ms,
                          const AllocatorConfig& config);

}  // namespace adacache
