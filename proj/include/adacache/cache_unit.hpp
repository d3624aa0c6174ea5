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
#include <deque>
#include <list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "adacache/item_path.hpp"
#include "adacache/pattern.hpp"
#include "adacache/policy.hpp"

namespace adacache {

struct CacheBlock {
  std::string stream_id;
  ItemPath item;
  std::uint64_t size_bytes = 0;
  double last_access_ms = 0.0;
  bool pinned = false;
  bool prefetched = false;
  bool used = false;
};

enum class AccessOutcome { hit, miss, ghost_hit_miss };
const char* to_string(AccessOutcome outcome);

/// Ghost cache of recently evicted block ids, most recent first. Bounded by
/// the configured window and disjoint from the resident set by construction
/// (admission removes the id).
class BufferWindow {
 public:
  explicit BufferWindow(std::size_t capacity) : capacity_(capacity) {}

  bool contains(const std::string& id) const { return index_.count(id) > 0; }

  void insert(const std::string& id) {
    remove(id);
    order_.push_front(id);
    index_[id] = order_.begin();
    if (order_.size() > capacity_) {
      index_.erase(order_.back());
      order_.pop_back();
    }
  }

  void refresh(const std::string& id) {
    const auto it = index_.find(id);
    if (it == index_.end()) {
      return;
    }
    order_.splice(order_.begin(), order_, it->second);
    it->second = order_.begin();
  }

  void remove(const std::string& id) {
    const auto it = index_.find(id);
    if (it == index_.end()) {
      return;
    }
    order_.erase(it->second);
    index_.erase(it);
  }

  void clear() {
    order_.clear();
    index_.clear();
  }

  std::size_t size() const { return order_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::list<std::string> order_;
  std::unordered_map<std::string, std::list<std::string>::iterator> index_;
};

/// Per-stream cache partition. Victim selection works at the stream's child
/// granularity (a group is the next path segment below the stream prefix);
/// evicting a group evicts all of its resident blocks. Baseline shared units
/// use block granularity instead.
class CacheManageUnit {
 public:
  struct Stats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t ghost_hits = 0;
    std::uint64_t prefetch_fetched_bytes = 0;
    std::uint64_t prefetch_used_bytes = 0;
    std::uint64_t bypasses = 0;
  };

  CacheManageUnit(std::string id, std::uint64_t quota_bytes, EvictionPolicy policy,
                  std::size_t ghost_capacity, bool block_granularity);

  const std::string& id() const { return id_; }
  std::uint64_t quota_bytes() const { return quota_; }
  std::uint64_t used_bytes() const { return used_; }
  EvictionPolicy policy() const { return policy_; }
  const Stats& stats() const { return stats_; }
  const BufferWindow& buffer_window() const { return ghost_; }
  bool expired() const { return expired_; }
  std::size_t resident_blocks() const { return blocks_.size(); }

  const std::optional<PatternLabel>& pattern() const { return pattern_; }
  void set_pattern(PatternLabel label) { pattern_ = label; }
  const std::optional<TtlModel>& ttl() const { return ttl_; }
  void set_ttl(const TtlModel& model) { ttl_ = model; }
  void clear_ttl() { ttl_ = std::nullopt; }

  double last_request_ms() const { return last_request_ms_; }
  double created_ms() const { return created_ms_; }
  void note_created(double now_ms) { created_ms_ = now_ms; }

  /// Switching policy keeps resident blocks; pinning follows the new policy.
  void set_policy(EvictionPolicy policy);

  bool resident(const ItemPath& block) const { return blocks_.count(block.str()) > 0; }

  /// Demand access. Misses attempt admission under the unit's policy; a
  /// block larger than the quota bypasses the cache. Under eager eviction a
  /// block is dropped as soon as it has been served.
  AccessOutcome access(const ItemPath& block, std::uint64_t size_bytes, double now_ms);

  /// Admission of a background-fetched block (not an access). Returns true
  /// when the block became resident.
  bool admit_prefetched(const ItemPath& block, std::uint64_t size_bytes, double now_ms);

  /// Admission of a block inherited from a merged partition; same capacity
  /// rules, but not counted toward prefetch statistics.
  bool admit_inherited(const ItemPath& block, std::uint64_t size_bytes, double now_ms);

  void note_prefetch_fetched(std::uint64_t bytes) { stats_.prefetch_fetched_bytes += bytes; }

  /// Applies a new quota; shrinking evicts under the unit's own policy until
  /// compliant. Returns evicted block ids.
  std::vector<std::string> resize_quota(std::uint64_t new_quota_bytes);

  /// Evicts everything and marks the unit expired; statistics survive. The
  /// caller releases the quota.
  std::vector<std::string> expire_stream();

  void reactivate(std::uint64_t quota_bytes, double now_ms);
  void set_quota(std::uint64_t quota_bytes) { quota_ = quota_bytes; }

  /// Removes and returns all resident blocks without touching statistics or
  /// the ghost window; used when partitions merge.
  std::vector<CacheBlock> take_blocks();

  /// Drops rate samples older than the trailing window.
  void prune_samples(double now_ms, double period_ms);

  /// Requests/sec and ghost-hit frequency over the trailing window.
  struct RateSample {
    double arrival_rate_per_s = 0.0;
    double ghost_hit_freq = 0.0;
    std::uint64_t requests = 0;
  };
  RateSample sample_rates(double now_ms, double period_ms) const;

 private:
  struct Group {
    std::list<std::string>::iterator order_pos;
    std::set<std::string> block_ids;
  };

  std::string group_of(const ItemPath& item) const;
  bool admit_background(const ItemPath& block, std::uint64_t size_bytes, double now_ms,
                        bool prefetched);
  void admit_block(const ItemPath& item, std::uint64_t size, double now, bool pinned,
                   bool prefetched);
  void drop_block(const std::string& id, bool to_ghost);
  std::vector<std::string> evict_front_group();
  void record_request(double now_ms);

  std::string id_;
  std::uint64_t quota_;
  std::uint64_t used_ = 0;
  EvictionPolicy policy_;
  bool block_granularity_;
  bool expired_ = false;

  std::unordered_map<std::string, CacheBlock> blocks_;
  std::unordered_map<std::string, Group> groups_;
  std::list<std::string> order_;  // front = next victim group
  BufferWindow ghost_;

  Stats stats_;
  std::optional<PatternLabel> pattern_;
  std::optional<TtlModel> ttl_;
  double created_ms_ = 0.0;
  double last_request_ms_ = 0.0;
  std::deque<double> request_ts_;
  std::deque<double> ghost_hit_ts_;
};

}  // namespace adacache
