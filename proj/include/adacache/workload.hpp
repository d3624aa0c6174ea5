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
#include <string>
#include <vector>

#include "adacache/catalog.hpp"
#include "adacache/trace.hpp"

namespace adacache {

enum class WorkloadPattern { sequential, random_epoch, zipf_skewed };

const char* to_string(WorkloadPattern pattern);
WorkloadPattern workload_pattern_from_string(const std::string& text);

/// Synthetic workload over the children of dataset_root.
///
/// sequential   - one pass over the first item_count children in catalog order.
/// random_epoch - `epochs` independent uniform permutations; every item appears
///                exactly once per epoch.
/// zipf_skewed  - request_count i.i.d. draws with P(rank r) proportional to
///                r^(-zipf_exponent); rank 1 is the first child in catalog order.
struct WorkloadSpec {
  WorkloadPattern pattern = WorkloadPattern::sequential;
  ItemPath dataset_root;
  std::uint64_t item_count = 0;
  std::uint32_t epochs = 1;           // random_epoch only
  double zipf_exponent = 1.0;         // zipf_skewed only
  std::uint64_t request_count = 0;    // zipf_skewed only; 0 means item_count
  std::int64_t inter_request_gap_ms = 0;
  std::int64_t start_ms = 0;
  std::string job_id = "job";
  // When items are directories, restrict each item access to this relative
  // child instead of traversing the whole item.
  std::string within_item;
};

/// Expands the spec into block-granular events on a virtual clock. Events are
/// spaced by inter_request_gap_ms and are identical for identical (spec, seed).
/// Throws ConfigError when the dataset or parameters are inconsistent.
std::vector<AccessEvent> generate_workload(const WorkloadSpec& spec,
                                           const NamespaceCatalog& catalog,
                                           std::uint64_t seed);

}  // namespace adacache
