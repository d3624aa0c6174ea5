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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "adacache/allocator.hpp"
#include "adacache/catalog.hpp"
#include "adacache/sim_config.hpp"
#include "adacache/trace.hpp"

namespace adacache {

struct JobReport {
  std::uint64_t events = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::optional<double> chr;
  double jct_ms = 0.0;
  double first_ms = 0.0;
  double done_ms = 0.0;
};

struct StreamReport {
  std::string pattern;
  double transition_ms = 0.0;
  std::vector<std::pair<double, std::string>> label_history;
};

struct UnitReport {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t ghost_hits = 0;
  std::uint64_t quota_bytes = 0;
  std::uint64_t used_bytes = 0;
  std::string policy;
  std::string pattern;
  std::uint64_t prefetch_fetched_bytes = 0;
  std::uint64_t prefetch_used_bytes = 0;
  bool expired = false;
};

struct AllocationUnitPoint {
  std::uint64_t quota_bytes = 0;
  double benefit_per_s = 0.0;
  bool warming = false;
};

struct AllocationPoint {
  double t_ms = 0.0;
  std::uint64_t free_pool_bytes = 0;
  std::map<std::string, AllocationUnitPoint> units;
  std::vector<QuotaTransfer> transfers;  // to_unit empty = released to pool
};

struct ChrPoint {
  double t_ms = 0.0;
  std::optional<double> overall;
  std::map<std::string, std::optional<double>> per_job;
};

struct SimReport {
  std::uint64_t total_events = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t ghost_hits = 0;
  std::optional<double> overall_chr;
  std::optional<double> avg_jct_ms;
  std::uint64_t prefetch_fetched_bytes = 0;
  std::uint64_t prefetch_used_bytes = 0;
  std::map<std::string, JobReport> per_job;
  std::map<std::string, StreamReport> per_stream;
  std::map<std::string, UnitReport> per_unit;
  std::vector<AllocationPoint> allocation_timeline;
  std::vector<ChrPoint> chr_timeline;

  nlohmann::ordered_json to_json() const;
  static SimReport from_json(const nlohmann::json& doc);
};

/// Deterministic closed-loop trace replay: each job issues its next request
/// once the previous one completed plus the think time recorded in the trace.
/// Demand misses and prefetch transfers share the remote bandwidth channel;
/// demand goes first. Identical inputs produce byte-identical reports.
class Simulator {
 public:
  Simulator(const NamespaceCatalog& catalog, SimConfig config);
  ~Simulator();

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Replays the trace. Throws LookupError before simulation starts when a
  /// path does not resolve in the catalog, ConfigError on bad configuration.
  SimReport run(std::span<const AccessEvent> events);

 private:
  class Impl;
  const NamespaceCatalog& catalog_;
  SimConfig config_;
};

}  // namespace adacache
