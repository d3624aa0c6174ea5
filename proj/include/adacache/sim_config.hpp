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
#include <iosfwd>
#include <string>

#include "adacache/allocator.hpp"
#include "adacache/pattern.hpp"
#include "adacache/policy.hpp"
#include "adacache/stream_tree.hpp"

namespace adacache {

/// Remote-storage service model. A miss costs
///   remote_delay_ms + size*8/remote_bandwidth_bps*1000 + hit_latency_ms
/// plus any queueing on the shared bandwidth channel.
struct LatencyModel {
  double hit_latency_ms = 0.1;
  double remote_delay_ms = 150.0;
  double remote_bandwidth_bps = 1e9;
};

/// Unloaded miss service time for one block.
double compute_miss_service_ms(std::uint64_t size_bytes, const LatencyModel& model);

enum class PolicyMode { adaptive, lru, fifo, uniform };
enum class PrefetchModeFlag { adaptive, stride, none };
enum class AllocMode { adaptive, fixed };
enum class TtlMode { adaptive, fixed, none };

PolicyMode policy_mode_from_string(const std::string& text);
PrefetchModeFlag prefetch_mode_from_string(const std::string& text);
AllocMode alloc_mode_from_string(const std::string& text);
TtlMode ttl_mode_from_string(const std::string& text);

struct SimConfig {
  TreeConfig tree;
  RecognizerConfig recognizer;
  PolicyConfig policy;
  AllocatorConfig allocator;
  LatencyModel latency;

  std::uint64_t cache_capacity_bytes = 8ULL * 1024 * 1024 * 1024;
  std::size_t buffer_window_blocks = 100;

  PolicyMode policy_mode = PolicyMode::adaptive;
  PrefetchModeFlag prefetch_mode = PrefetchModeFlag::adaptive;
  AllocMode alloc_mode = AllocMode::adaptive;
  TtlMode ttl_mode = TtlMode::adaptive;
  double fixed_ttl_ms = 600000.0;

  // 0 = prefetch paced only by the shared channel.
  double prefetch_rate_bps = 0.0;

  /// Applies one "key = value" setting; throws ConfigError on unknown keys
  /// or bad values.
  void apply(const std::string& key, const std::string& value);

  /// Flat key-value file: one setting per line, '#' comments.
  void load_file(std::istream& in);
};

}  // namespace adacache
