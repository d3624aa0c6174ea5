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

#include "adacache/policy.hpp"

#include <algorithm>
#include <cmath>

#include "adacache/errors.hpp"

namespace adacache {

const char* to_string(EvictionPolicy policy) {
  switch (policy) {
    case EvictionPolicy::eager:
      return "eager";
    case EvictionPolicy::uniform:
      return "uniform";
    case EvictionPolicy::lru:
      return "lru";
    case EvictionPolicy::fifo:
      return "fifo";
  }
  return "?";
}

EvictionPolicy eviction_policy_from_string(const std::string& text) {
  if (text == "eager") return EvictionPolicy::eager;
  if (text == "uniform") return EvictionPolicy::uniform;
  if (text == "lru") return EvictionPolicy::lru;
  if (text == "fifo") return EvictionPolicy::fifo;
  throw ConfigError("unknown eviction policy: " + text);
}

const char* to_string(PrefetchKind kind) {
  switch (kind) {
    case PrefetchKind::stride:
      return "stride";
    case PrefetchKind::statistical:
      return "statistical";
    case PrefetchKind::none:
      return "none";
  }
  return "?";
}

const char* to_string(Granularity granularity) {
  switch (granularity) {
    case Granularity::block:
      return "block";
    case Granularity::file:
      return "file";
    case Granularity::directory:
      return "directory";
  }
  return "?";
}

namespace {

bool is_resident(const ResidencyProbe& probe, const ItemPath& block) {
  return probe && probe(block);
}

// Expands `path` (a candidate below the stream) into block targets, keeping
// only hot relative children according to the stream's frequency table.
// rel_prefix is the identifier of `path` relative to the stream's children
// ("" at the candidate itself).
void expand_filtered(const NamespaceCatalog& catalog, const ChildFrequencyTable& freq,
                     const PolicyConfig& config, const ResidencyProbe& resident,
                     const std::string& path, const std::string& rel_prefix,
                     std::vector<ItemPath>& out) {
  std::vector<std::string> kid_names;
  bool kids_are_blocks = false;
  if (catalog.is_file(path)) {
    const std::uint64_t blocks = catalog.block_count(path);
    if (blocks == 1) {
      // Single-block files resolve directly; there is no sub-position to
      // discriminate.
      const ItemPath target = ItemPath::parse(path).with_block(0);
      if (!is_resident(resident, target)) {
        out.push_back(target);
      }
      return;
    }
    kid_names.reserve(blocks);
    for (std::uint64_t b = 0; b < blocks; ++b) {
      kid_names.push_back(std::to_string(b));
    }
    kids_are_blocks = true;
  } else if (catalog.is_dir(path)) {
    kid_names = catalog.children(path);
  } else {
    return;
  }

  const bool evidence = freq.has_evidence_below(rel_prefix);
  for (const auto& name : kid_names) {
    const std::string rel_id = rel_prefix.empty() ? name : rel_prefix + "/" + name;
    if (evidence && freq.frequency(rel_id) < config.hot_child_threshold) {
      continue;
    }
    if (kids_are_blocks) {
      ItemPath target = ItemPath::parse(path).with_block(std::stoull(name));
      if (!is_resident(resident, target)) {
        out.push_back(std::move(target));
      }
    } else {
      expand_filtered(catalog, freq, config, resident, path + "/" + name, rel_id, out);
    }
  }
}

}  // namespace

PrefetchPlan hierarchical_filter(const PrefetchPlan& plan, const ChildFrequencyTable& freq,
                                 const NamespaceCatalog& catalog, const PolicyConfig& config,
                                 const ResidencyProbe& resident) {
  PrefetchPlan out;
  out.granularity = plan.granularity;
  out.stream_prefix = plan.stream_prefix;
  for (const auto& candidate : plan.targets) {
    if (candidate.block_index) {
      if (!is_resident(resident, candidate)) {
        out.targets.push_back(candidate);
      }
      continue;
    }
    expand_filtered(catalog, freq, config, resident, candidate.file_str(), "", out.targets);
  }
  return out;
}

PrefetchPlan plan_prefetch_sequential(const AccessStreamNode& stream,
                                      const NamespaceCatalog& catalog, const PolicyConfig& config,
                                      const ResidencyProbe& resident) {
  PrefetchPlan plan;
  plan.stream_prefix = stream.path_str();
  if (stream.window().empty()) {
    return plan;
  }
  const std::int64_t last = stream.window().back().index;

  if (catalog.is_file(stream.path_str())) {
    // Block-level stream: the next N blocks of this file.
    plan.granularity = Granularity::block;
    const ItemPath file = ItemPath::parse(stream.path_str());
    const auto blocks = static_cast<std::int64_t>(catalog.block_count(stream.path_str()));
    for (std::int64_t b = last + 1; b <= last + config.prefetch_depth && b < blocks; ++b) {
      ItemPath target = file.with_block(static_cast<std::uint64_t>(b));
      if (!is_resident(resident, target)) {
        plan.targets.push_back(std::move(target));
      }
    }
    return plan;
  }
  if (!catalog.is_dir(stream.path_str())) {
    return plan;
  }

  const auto& kids = catalog.children(stream.path_str());
  PrefetchPlan raw;
  raw.stream_prefix = plan.stream_prefix;
  bool all_files = true;
  for (std::int64_t i = last + 1;
       i <= last + config.prefetch_depth && i < static_cast<std::int64_t>(kids.size()); ++i) {
    const std::string child_path = (stream.path_str() == "/" ? "" : stream.path_str()) + "/" +
                                   kids[static_cast<std::size_t>(i)];
    all_files = all_files && catalog.is_file(child_path);
    raw.targets.push_back(ItemPath::parse(child_path));
  }
  raw.granularity = all_files ? Granularity::file : Granularity::directory;
  return hierarchical_filter(raw, stream.child_freq(), catalog, config, resident);
}

PrefetchPlan plan_prefetch_random(const AccessStreamNode& stream, std::uint64_t quota_bytes,
                                  std::uint64_t dataset_bytes, const NamespaceCatalog& catalog,
                                  const PolicyConfig& config, const ResidencyProbe& resident) {
  PrefetchPlan plan;
  plan.granularity = Granularity::block;
  plan.stream_prefix = stream.path_str();
  if (dataset_bytes == 0) {
    return plan;
  }
  const double expected_chr =
      std::min(1.0, static_cast<double>(quota_bytes) / static_cast<double>(dataset_bytes));
  if (expected_chr < config.statistical_prefetch_chr_threshold) {
    return plan;
  }
  std::uint64_t planned_bytes = 0;
  catalog.for_each_block(stream.path_str(), [&](const ItemPath& block, std::uint64_t size) {
    if (planned_bytes + size > quota_bytes) {
      return false;
    }
    if (!is_resident(resident, block)) {
      plan.targets.push_back(block);
      planned_bytes += size;
    }
    return true;
  });
  return plan;
}

PolicyChoice select_policies(PatternLabel pattern) {
  switch (pattern) {
    case PatternLabel::sequential:
      return {PrefetchKind::stride, EvictionPolicy::eager};
    case PatternLabel::random:
      return {PrefetchKind::statistical, EvictionPolicy::uniform};
    case PatternLabel::skewed:
      return {PrefetchKind::none, EvictionPolicy::lru};
  }
  return {PrefetchKind::none, EvictionPolicy::lru};
}

TtlModel fit_ttl(std::span<const double> temporal_gaps_ms, const PolicyConfig& config) {
  if (temporal_gaps_ms.size() < 2) {
    throw InsufficientDataError("TTL fit needs at least two temporal gaps, got " +
                                std::to_string(temporal_gaps_ms.size()));
  }
  const auto n = static_cast<double>(temporal_gaps_ms.size());
  double mean = 0.0;
  for (const double gap : temporal_gaps_ms) {
    mean += gap;
  }
  mean /= n;
  double ss = 0.0;
  for (const double gap : temporal_gaps_ms) {
    ss += (gap - mean) * (gap - mean);
  }
  TtlModel model;
  model.mu_ms = mean;
  model.sigma_ms = std::sqrt(ss / (n - 1.0));
  model.z = config.ttl_z;
  model.base_ms = config.ttl_base_ms;
  return model;
}

bool check_stream_expiry(double last_access_ms, double now_ms, const TtlModel& ttl) {
  return now_ms - last_access_ms > ttl.ttl_ms();
}

}  // namespace adacache
