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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <list>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "adacache/catalog.hpp"
#include "adacache/pattern.hpp"
#include "adacache/rng.hpp"
#include "adacache/trace.hpp"

namespace adacache::test {

inline std::string padded(std::uint64_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  return digits.size() >= width ? digits : std::string(width - digits.size(), '0') + digits;
}

/// Flat dataset: root/f0000..f{n-1}, each file `file_size` bytes.
inline NamespaceCatalog flat_catalog(const std::string& root, std::uint64_t files,
                                     std::uint64_t file_size, std::uint64_t block_size) {
  NamespaceCatalog catalog(block_size);
  const std::size_t width = std::to_string(files - 1).size();
  for (std::uint64_t i = 0; i < files; ++i) {
    catalog.add_file(root + "/f" + padded(i, width), file_size);
  }
  return catalog;
}

/// Nested dataset: root/d000../<name> for each name in file_names.
inline NamespaceCatalog nested_catalog(const std::string& root, std::uint64_t dirs,
                                       const std::vector<std::string>& file_names,
                                       std::uint64_t file_size, std::uint64_t block_size) {
  NamespaceCatalog catalog(block_size);
  const std::size_t width = std::to_string(dirs - 1).size();
  for (std::uint64_t d = 0; d < dirs; ++d) {
    for (const auto& name : file_names) {
      catalog.add_file(root + "/d" + padded(d, width) + "/" + name, file_size);
    }
  }
  return catalog;
}

inline AccessEvent event_at(std::int64_t ts_ms, const std::string& path, std::uint64_t offset,
                            std::uint64_t length, const std::string& job) {
  AccessEvent ev;
  ev.ts_ms = ts_ms;
  ev.path = ItemPath::parse(path);
  ev.offset_bytes = offset;
  ev.length_bytes = length;
  ev.job_id = job;
  return ev;
}

/// Reference PMF of the spatial gap for uniform random access without
/// replacement: enumerate all ordered pairs (i, j), i != j, from {1..c}.
inline std::vector<double> brute_force_gap_pmf(std::uint64_t c) {
  std::vector<std::uint64_t> counts(c, 0);  // counts[k] for gap k, k in 1..c-1
  for (std::uint64_t i = 1; i <= c; ++i) {
    for (std::uint64_t j = 1; j <= c; ++j) {
      if (i == j) {
        continue;
      }
      const std::uint64_t gap = i > j ? i - j : j - i;
      ++counts[gap];
    }
  }
  const double total = static_cast<double>(c) * static_cast<double>(c - 1);
  std::vector<double> pmf(c, 0.0);
  for (std::uint64_t k = 1; k < c; ++k) {
    pmf[k] = static_cast<double>(counts[k]) / total;
  }
  return pmf;
}

inline double harmonic(std::uint64_t n, double exponent = 1.0) {
  double sum = 0.0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    sum += std::pow(static_cast<double>(i), -exponent);
  }
  return sum;
}

/// Window of consecutive accesses from one uniform permutation of c items.
inline std::vector<WindowEntry> permutation_window(std::uint64_t c, std::size_t length, Rng& rng) {
  std::vector<std::int64_t> order(c);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<WindowEntry> window;
  window.reserve(length);
  for (std::size_t i = 0; i < length && i < order.size(); ++i) {
    window.push_back({order[i], static_cast<std::int64_t>(i)});
  }
  return window;
}

/// Window of i.i.d. Zipf-rank accesses over c items.
inline std::vector<WindowEntry> zipf_window(std::uint64_t c, double exponent, std::size_t length,
                                            Rng& rng) {
  std::vector<double> cdf(c);
  double total = 0.0;
  for (std::uint64_t r = 0; r < c; ++r) {
    total += std::pow(static_cast<double>(r + 1), -exponent);
    cdf[r] = total;
  }
  std::vector<WindowEntry> window;
  window.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double u = rng.uniform_double() * total;
    const auto pos = std::lower_bound(cdf.begin(), cdf.end(), u);
    window.push_back({static_cast<std::int64_t>(pos - cdf.begin()), static_cast<std::int64_t>(i)});
  }
  return window;
}

/// Draws one gap from the exact triangular distribution via inverse CDF.
inline std::uint64_t triangular_gap_sample(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform_double();
  const auto pos = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint64_t>(pos - cdf.begin()) + 1;
}

inline std::vector<double> triangular_cdf_table(std::uint64_t c) {
  std::vector<double> cdf(c - 1);
  double acc = 0.0;
  const double denom = static_cast<double>(c) * static_cast<double>(c - 1);
  for (std::uint64_t k = 1; k <= c - 1; ++k) {
    acc += 2.0 * static_cast<double>(c - k) / denom;
    cdf[k - 1] = acc;
  }
  cdf.back() = 1.0;
  return cdf;
}

// ---------------------------------------------------------------------------
// Brute-force reference caches (block granularity, byte quotas)
// ---------------------------------------------------------------------------

struct RefOutcome {
  bool hit = false;
};

/// Classic LRU over block ids.
class RefLru {
 public:
  explicit RefLru(std::uint64_t quota) : quota_(quota) {}

  bool access(const std::string& id, std::uint64_t size) {
    const auto it = pos_.find(id);
    if (it != pos_.end()) {
      order_.splice(order_.end(), order_, it->second);
      return true;
    }
    if (size > quota_) {
      return false;
    }
    while (used_ + size > quota_) {
      evict_front();
    }
    order_.push_back(id);
    pos_[id] = std::prev(order_.end());
    sizes_[id] = size;
    used_ += size;
    return false;
  }

 private:
  void evict_front() {
    const std::string victim = order_.front();
    order_.pop_front();
    used_ -= sizes_[victim];
    sizes_.erase(victim);
    pos_.erase(victim);
  }

  std::uint64_t quota_;
  std::uint64_t used_ = 0;
  std::list<std::string> order_;
  std::unordered_map<std::string, std::list<std::string>::iterator> pos_;
  std::unordered_map<std::string, std::uint64_t> sizes_;
};

/// FIFO: eviction in admission order, no reordering on hits.
class RefFifo {
 public:
  explicit RefFifo(std::uint64_t quota) : quota_(quota) {}

  bool access(const std::string& id, std::uint64_t size) {
    if (resident_.count(id) > 0) {
      return true;
    }
    if (size > quota_) {
      return false;
    }
    while (used_ + size > quota_) {
      const std::string victim = order_.front();
      order_.pop_front();
      used_ -= resident_[victim];
      resident_.erase(victim);
    }
    order_.push_back(id);
    resident_[id] = size;
    used_ += size;
    return false;
  }

 private:
  std::uint64_t quota_;
  std::uint64_t used_ = 0;
  std::list<std::string> order_;
  std::unordered_map<std::string, std::uint64_t> resident_;  // id -> size
};

/// Pin until full, never evict.
class RefUniform {
 public:
  explicit RefUniform(std::uint64_t quota) : quota_(quota) {}

  bool access(const std::string& id, std::uint64_t size) {
    if (resident_.count(id) > 0) {
      return true;
    }
    if (used_ + size <= quota_) {
      resident_.emplace(id, size);
      used_ += size;
    }
    return false;
  }

 private:
  std::uint64_t quota_;
  std::uint64_t used_ = 0;
  std::unordered_map<std::string, std::uint64_t> resident_;
};

}  // namespace adacache::test
