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

#include "adacache/allocator.hpp"

#include <algorithm>

namespace adacache {

BenefitEstimate benefit_sequential(std::string unit_id) {
  BenefitEstimate estimate;
  estimate.unit_id = std::move(unit_id);
  estimate.pattern = PatternLabel::sequential;
  estimate.benefit_per_s = 0.0;
  return estimate;
}

BenefitEstimate benefit_random(std::string unit_id, std::optional<double> mean_gap_s,
                               std::uint64_t dataset_blocks) {
  BenefitEstimate estimate;
  estimate.unit_id = std::move(unit_id);
  estimate.pattern = PatternLabel::random;
  estimate.mean_gap_s = mean_gap_s;
  estimate.block_count = dataset_blocks;
  if (!mean_gap_s || *mean_gap_s <= 0.0 || dataset_blocks == 0) {
    estimate.warming = true;
    return estimate;
  }
  const double reuse = *mean_gap_s * static_cast<double>(dataset_blocks);
  estimate.reuse_time_s = reuse;
  estimate.benefit_per_s = 1.0 / reuse;
  return estimate;
}

BenefitEstimate benefit_skewed(std::string unit_id, double arrival_rate_per_s,
                               double ghost_hit_freq, std::uint64_t ghost_window, bool warmed_up) {
  BenefitEstimate estimate;
  estimate.unit_id = std::move(unit_id);
  estimate.pattern = PatternLabel::skewed;
  estimate.arrival_rate_per_s = arrival_rate_per_s;
  estimate.ghost_hit_freq = ghost_hit_freq;
  estimate.ghost_window = ghost_window;
  if (!warmed_up || ghost_window == 0) {
    estimate.warming = true;
    return estimate;
  }
  estimate.benefit_per_s = arrival_rate_per_s * ghost_hit_freq / static_cast<double>(ghost_window);
  return estimate;
}

AllocationRound rebalance(const std::vector<UnitAllocationState>& units,
                          std::uint64_t free_pool_bytes, double now_ms,
                          const AllocatorConfig& config) {
  AllocationRound round;
  round.at_ms = now_ms;
  round.round_bytes = config.round_bytes;
  round.period_ms = config.period_ms;
  if (units.empty()) {
    return round;
  }

  const auto better = [](const UnitAllocationState& a, const UnitAllocationState& b) {
    return a.benefit_per_s > b.benefit_per_s ||
           (a.benefit_per_s == b.benefit_per_s && a.unit_id < b.unit_id);
  };
  const UnitAllocationState* receiver = &units.front();
  for (const auto& unit : units) {
    if (better(unit, *receiver)) {
      receiver = &unit;
    }
  }

  if (free_pool_bytes > 0) {
    round.transfers.push_back(
        {"", receiver->unit_id, std::min(free_pool_bytes, config.round_bytes)});
  }

  const UnitAllocationState* donor = nullptr;
  for (const auto& unit : units) {
    if (unit.quota_bytes <= config.min_share_bytes) {
      continue;
    }
    if (donor == nullptr || better(*donor, unit)) {
      donor = &unit;
    }
  }
  if (donor != nullptr && donor->unit_id != receiver->unit_id &&
      receiver->benefit_per_s > donor->benefit_per_s) {
    const std::uint64_t slack = donor->quota_bytes - config.min_share_bytes;
    round.transfers.push_back({donor->unit_id, receiver->unit_id,
                               std::min(config.round_bytes, slack)});
  }
  return round;
}

}  // namespace adacache
