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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adacache/catalog.hpp"
#include "adacache/pattern.hpp"
#include "adacache/stream_tree.hpp"

namespace adacache {

struct PolicyConfig {
  std::uint32_t prefetch_depth = 4;                  // N sequential items ahead
  double hot_child_threshold = 0.8;                  // f_p
  double statistical_prefetch_chr_threshold = 0.8;   // expected-CHR gate
  double ttl_z = 2.326;                              // one-sided 99% quantile
  double ttl_base_ms = 60000.0;
};

enum class EvictionPolicy { eager, uniform, lru, fifo };
const char* to_string(EvictionPolicy policy);
EvictionPolicy eviction_policy_from_string(const std::string& text);

enum class PrefetchKind { stride, statistical, none };
const char* to_string(PrefetchKind kind);

enum class Granularity { block, file, directory };
const char* to_string(Granularity granularity);

struct PrefetchPlan {
  std::vector<ItemPath> targets;  // block-resolved
  Granularity granularity = Granularity::block;
  std::string stream_prefix;
};

/// Predicate for blocks that are already resident (or inbound) and must be
/// excluded from plans; an empty function means nothing is resident.
using ResidencyProbe = std::function<bool(const ItemPath&)>;

/// Next N siblings after the stream's most recently accessed child, in
/// catalog order and clipped at the end of the listing. Non-leaf candidates
/// pass through the hierarchical hot-child filter.
PrefetchPlan plan_prefetch_sequential(const AccessStreamNode& stream,
                                      const NamespaceCatalog& catalog, const PolicyConfig& config,
                                      const ResidencyProbe& resident = {});

/// Expands child-granularity candidates into block-resolved targets, keeping
/// at each level only relative children whose access probability f = x/n
/// meets the hot threshold. Levels without any recorded evidence expand
/// naively. Relative position is preserved across siblings.
PrefetchPlan hierarchical_filter(const PrefetchPlan& plan, const ChildFrequencyTable& freq,
                                 const NamespaceCatalog& catalog, const PolicyConfig& config,
                                 const ResidencyProbe& resident = {});

/// Whole-dataset plan for random streams: when the expected hit ratio
/// min(1, quota/dataset) reaches the threshold, lists non-resident blocks in
/// catalog order up to quota_bytes; otherwise empty.
PrefetchPlan plan_prefetch_random(const AccessStreamNode& stream, std::uint64_t quota_bytes,
                                  std::uint64_t dataset_bytes, const NamespaceCatalog& catalog,
                                  const PolicyConfig& config, const ResidencyProbe& resident = {});

struct PolicyChoice {
  PrefetchKind prefetch;
  EvictionPolicy eviction;
};

/// sequential -> (stride, eager); random -> (statistical, uniform);
/// skewed -> (none, lru).
PolicyChoice select_policies(PatternLabel pattern);

/// Idle-stream time-to-live fitted from temporal gaps:
/// ttl = base + mu + z * sigma.
struct TtlModel {
  double mu_ms = 0.0;
  double sigma_ms = 0.0;
  double z = 0.0;
  double base_ms = 0.0;

  double ttl_ms() const { return base_ms + mu_ms + z * sigma_ms; }
};

/// Sample mean and unbiased standard deviation of the gaps. Throws
/// InsufficientDataError for fewer than two samples.
TtlModel fit_ttl(std::span<const double> temporal_gaps_ms, const PolicyConfig& config);

/// True when the stream has been idle longer than its TTL, signalling
/// whole-dataset eviction and quota release.
bool check_stream_expiry(double last_access_ms, double now_ms, const TtlModel& ttl);

}  // namespace adacache
