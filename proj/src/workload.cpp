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

#include "adacache/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adacache/errors.hpp"
#include "adacache/rng.hpp"

namespace adacache {

const char* to_string(WorkloadPattern pattern) {
  switch (pattern) {
    case WorkloadPattern::sequential:
      return "sequential";
    case WorkloadPattern::random_epoch:
      return "random-epoch";
    case WorkloadPattern::zipf_skewed:
      return "zipf-skewed";
  }
  return "?";
}

WorkloadPattern workload_pattern_from_string(const std::string& text) {
  if (text == "sequential") return WorkloadPattern::sequential;
  if (text == "random-epoch") return WorkloadPattern::random_epoch;
  if (text == "zipf-skewed") return WorkloadPattern::zipf_skewed;
  throw ConfigError("unknown workload pattern: " + text);
}

namespace {

class EventBuilder {
 public:
  EventBuilder(const WorkloadSpec& spec, const NamespaceCatalog& catalog)
      : spec_(spec), catalog_(catalog), clock_ms_(spec.start_ms) {}

  void emit_item(const std::string& item_path) {
    if (!spec_.within_item.empty() && catalog_.is_dir(item_path)) {
      emit_file(item_path + "/" + spec_.within_item);
      return;
    }
    if (catalog_.is_file(item_path)) {
      emit_file(item_path);
      return;
    }
    for (const auto& kid : catalog_.children(item_path)) {
      emit_item(item_path + "/" + kid);
    }
  }

  std::vector<AccessEvent> take() { return std::move(events_); }

 private:
  void emit_file(const std::string& file_path) {
    if (!catalog_.is_file(file_path)) {
      throw ConfigError("workload references non-file path: " + file_path);
    }
    const ItemPath file = ItemPath::parse(file_path);
    const std::uint64_t blocks = catalog_.block_count(file_path);
    for (std::uint64_t b = 0; b < blocks; ++b) {
      AccessEvent ev;
      ev.ts_ms = clock_ms_;
      ev.path = file.with_block(b);
      ev.offset_bytes = b * catalog_.block_size_bytes();
      ev.length_bytes = catalog_.block_bytes(file_path, b);
      ev.job_id = spec_.job_id;
      events_.push_back(std::move(ev));
      clock_ms_ += spec_.inter_request_gap_ms;
    }
  }

  const WorkloadSpec& spec_;
  const NamespaceCatalog& catalog_;
  std::int64_t clock_ms_;
  std::vector<AccessEvent> events_;
};

}  // namespace

std::vector<AccessEvent> generate_workload(const WorkloadSpec& spec,
                                           const NamespaceCatalog& catalog,
                                           std::uint64_t seed) {
  const std::string root = spec.dataset_root.file_str();
  if (!catalog.is_dir(root)) {
    throw ConfigError("dataset root is not a catalog directory: " + root);
  }
  const auto& kids = catalog.children(root);
  if (spec.item_count == 0 || spec.item_count > kids.size()) {
    throw ConfigError("item_count " + std::to_string(spec.item_count) + " exceeds the " +
                      std::to_string(kids.size()) + " children of " + root);
  }
  if (spec.pattern == WorkloadPattern::zipf_skewed && !(spec.zipf_exponent > 0.0)) {
    throw ConfigError("zipf_exponent must be positive");
  }

  Rng rng(seed);
  EventBuilder builder(spec, catalog);
  const auto item_path = [&](std::uint64_t index) { return root + "/" + kids[index]; };

  switch (spec.pattern) {
    case WorkloadPattern::sequential: {
      for (std::uint64_t i = 0; i < spec.item_count; ++i) {
        builder.emit_item(item_path(i));
      }
      break;
    }
    case WorkloadPattern::random_epoch: {
      std::vector<std::uint64_t> order(spec.item_count);
      std::iota(order.begin(), order.end(), 0);
      for (std::uint32_t epoch = 0; epoch < spec.epochs; ++epoch) {
        rng.shuffle(order);
        for (const std::uint64_t i : order) {
          builder.emit_item(item_path(i));
        }
      }
      break;
    }
    case WorkloadPattern::zipf_skewed: {
      // Inverse-CDF sampling over cumulative rank weights.
      std::vector<double> cdf(spec.item_count);
      double total = 0.0;
      for (std::uint64_t r = 0; r < spec.item_count; ++r) {
        total += std::pow(static_cast<double>(r + 1), -spec.zipf_exponent);
        cdf[r] = total;
      }
      const std::uint64_t requests = spec.request_count == 0 ? spec.item_count : spec.request_count;
      for (std::uint64_t i = 0; i < requests; ++i) {
        const double u = rng.uniform_double() * total;
        const auto pos = std::lower_bound(cdf.begin(), cdf.end(), u);
        const auto rank = static_cast<std::uint64_t>(pos - cdf.begin());
        builder.emit_item(item_path(std::min(rank, spec.item_count - 1)));
      }
      break;
    }
  }
  return builder.take();
}

}  // namespace adacache
