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

#include "adacache/sim_config.hpp"

#include <istream>
#include <stdexcept>

#include "adacache/errors.hpp"

namespace adacache {

double compute_miss_service_ms(std::uint64_t size_bytes, const LatencyModel& model) {
  const double transfer_ms =
      static_cast<double>(size_bytes) * 8.0 / model.remote_bandwidth_bps * 1000.0;
  return model.remote_delay_ms + transfer_ms + model.hit_latency_ms;
}

PolicyMode policy_mode_from_string(const std::string& text) {
  if (text == "adaptive") return PolicyMode::adaptive;
  if (text == "lru" || text == "arc-less-baseline") return PolicyMode::lru;
  if (text == "fifo") return PolicyMode::fifo;
  if (text == "uniform") return PolicyMode::uniform;
  throw ConfigError("unknown policy mode: " + text);
}

PrefetchModeFlag prefetch_mode_from_string(const std::string& text) {
  if (text == "adaptive") return PrefetchModeFlag::adaptive;
  if (text == "stride") return PrefetchModeFlag::stride;
  if (text == "none") return PrefetchModeFlag::none;
  throw ConfigError("unknown prefetch mode: " + text);
}

AllocMode alloc_mode_from_string(const std::string& text) {
  if (text == "adaptive") return AllocMode::adaptive;
  if (text == "static" || text == "fixed") return AllocMode::fixed;
  throw ConfigError("unknown allocation mode: " + text);
}

TtlMode ttl_mode_from_string(const std::string& text) {
  if (text == "adaptive") return TtlMode::adaptive;
  if (text == "fixed") return TtlMode::fixed;
  if (text == "none") return TtlMode::none;
  throw ConfigError("unknown ttl mode: " + text);
}

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    // Double round-trip keeps scientific notation ("7.5e9") usable for byte
    // counts.
    const double v = std::stod(value);
    if (v < 0) {
      throw ConfigError(key + " must be non-negative");
    }
    return static_cast<std::uint64_t>(v);
  } catch (const std::logic_error&) {
    throw ConfigError("bad value for " + key + ": " + value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    return std::stod(value);
  } catch (const std::logic_error&) {
    throw ConfigError("bad value for " + key + ": " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("bad value for " + key + ": " + value);
}

}  // namespace

void SimConfig::apply(const std::string& key, const std::string& value) {
  if (key == "window_size") {
    tree.window_size = parse_u64(key, value);
  } else if (key == "max_nodes") {
    tree.max_nodes = parse_u64(key, value);
  } else if (key == "compression") {
    tree.compression_enabled = parse_bool(key, value);
  } else if (key == "freq_table_cap") {
    tree.freq_table_cap = parse_u64(key, value);
  } else if (key == "alpha") {
    recognizer.alpha = parse_double(key, value);
  } else if (key == "sequential_threshold") {
    recognizer.sequential_fraction_threshold = parse_double(key, value);
  } else if (key == "repeat_skew_fraction") {
    recognizer.repeat_skew_fraction = parse_double(key, value);
  } else if (key == "min_random_c") {
    recognizer.min_random_c = parse_u64(key, value);
  } else if (key == "prefetch_depth" || key == "N") {
    policy.prefetch_depth = static_cast<std::uint32_t>(parse_u64(key, value));
  } else if (key == "f_p" || key == "hot_child_threshold") {
    policy.hot_child_threshold = parse_double(key, value);
  } else if (key == "statistical_chr_threshold") {
    policy.statistical_prefetch_chr_threshold = parse_double(key, value);
  } else if (key == "ttl_z") {
    policy.ttl_z = parse_double(key, value);
  } else if (key == "ttl_base_ms") {
    policy.ttl_base_ms = parse_double(key, value);
  } else if (key == "round_bytes") {
    allocator.round_bytes = parse_u64(key, value);
  } else if (key == "period_ms") {
    allocator.period_ms = static_cast<std::int64_t>(parse_u64(key, value));
  } else if (key == "min_share" || key == "min_share_bytes") {
    allocator.min_share_bytes = parse_u64(key, value);
  } else if (key == "hit_latency_ms") {
    latency.hit_latency_ms = parse_double(key, value);
  } else if (key == "remote_delay_ms") {
    latency.remote_delay_ms = parse_double(key, value);
  } else if (key == "remote_bandwidth_bps") {
    latency.remote_bandwidth_bps = parse_double(key, value);
  } else if (key == "cache_bytes" || key == "cache_capacity_bytes") {
    cache_capacity_bytes = parse_u64(key, value);
  } else if (key == "w" || key == "buffer_window") {
    buffer_window_blocks = parse_u64(key, value);
  } else if (key == "policy") {
    policy_mode = policy_mode_from_string(value);
  } else if (key == "prefetch") {
    prefetch_mode = prefetch_mode_from_string(value);
  } else if (key == "alloc") {
    alloc_mode = alloc_mode_from_string(value);
  } else if (key == "ttl") {
    ttl_mode = ttl_mode_from_string(value);
  } else if (key == "fixed_ttl_ms") {
    fixed_ttl_ms = parse_double(key, value);
  } else if (key == "prefetch_rate_bps") {
    prefetch_rate_bps = parse_double(key, value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void SimConfig::load_file(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) {
      line.resize(comment);
    }
    const std::string text = trim(line);
    if (text.empty()) {
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
  }
}

}  // namespace adacache
