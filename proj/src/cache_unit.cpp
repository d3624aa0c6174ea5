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

#include "adacache/cache_unit.hpp"

#include <algorithm>

namespace adacache {

const char* to_string(AccessOutcome outcome) {
  switch (outcome) {
    case AccessOutcome::hit:
      return "hit";
    case AccessOutcome::miss:
      return "miss";
    case AccessOutcome::ghost_hit_miss:
      return "ghost_hit_miss";
  }
  return "?";
}

CacheManageUnit::CacheManageUnit(std::string id, std::uint64_t quota_bytes, EvictionPolicy policy,
                                 std::size_t ghost_capacity, bool block_granularity)
    : id_(std::move(id)),
      quota_(quota_bytes),
      policy_(policy),
      block_granularity_(block_granularity),
      ghost_(ghost_capacity) {}

std::string CacheManageUnit::group_of(const ItemPath& item) const {
  if (block_granularity_) {
    return item.str();
  }
  const std::string file = item.file_str();
  const std::size_t base = id_ == "/" ? 0 : id_.size();
  if (file.size() > base + 1 && file.compare(0, base, id_, 0, base) == 0 && file[base] == '/') {
    const std::size_t next = file.find('/', base + 1);
    return file.substr(base + 1, next == std::string::npos ? std::string::npos : next - base - 1);
  }
  // Stream at file level: blocks are the children.
  return item.str();
}

void CacheManageUnit::set_policy(EvictionPolicy policy) {
  if (policy_ == policy) {
    return;
  }
  policy_ = policy;
  const bool pinned = policy_ == EvictionPolicy::uniform;
  for (auto& [_, block] : blocks_) {
    block.pinned = pinned;
  }
}

void CacheManageUnit::record_request(double now_ms) {
  last_request_ms_ = now_ms;
  request_ts_.push_back(now_ms);
}

AccessOutcome CacheManageUnit::access(const ItemPath& block, std::uint64_t size_bytes,
                                      double now_ms) {
  record_request(now_ms);
  const std::string id = block.str();

  const auto it = blocks_.find(id);
  if (it != blocks_.end()) {
    ++stats_.hits;
    it->second.last_access_ms = now_ms;
    if (it->second.prefetched && !it->second.used) {
      it->second.used = true;
      stats_.prefetch_used_bytes += it->second.size_bytes;
    }
    if (policy_ == EvictionPolicy::lru) {
      const auto group = groups_.find(group_of(block));
      order_.splice(order_.end(), order_, group->second.order_pos);
    }
    if (policy_ == EvictionPolicy::eager) {
      // One-shot stream: the block has been served, drop it.
      drop_block(id, /*to_ghost=*/true);
    }
    return AccessOutcome::hit;
  }

  AccessOutcome outcome = AccessOutcome::miss;
  if (ghost_.contains(id)) {
    outcome = AccessOutcome::ghost_hit_miss;
    ++stats_.ghost_hits;
    ghost_hit_ts_.push_back(now_ms);
    if (policy_ == EvictionPolicy::lru) {
      ghost_.refresh(id);
    }
  }
  ++stats_.misses;

  if (size_bytes > quota_) {
    ++stats_.bypasses;
    return outcome;
  }
  switch (policy_) {
    case EvictionPolicy::eager:
      // Admitted for the duration of the serve only; net effect is a ghost
      // entry.
      ghost_.insert(id);
      break;
    case EvictionPolicy::uniform:
      if (used_ + size_bytes <= quota_) {
        admit_block(block, size_bytes, now_ms, /*pinned=*/true, /*prefetched=*/false);
      } else {
        ++stats_.bypasses;
      }
      break;
    case EvictionPolicy::lru:
    case EvictionPolicy::fifo:
      while (used_ + size_bytes > quota_) {
        evict_front_group();
      }
      admit_block(block, size_bytes, now_ms, /*pinned=*/false, /*prefetched=*/false);
      break;
  }
  return outcome;
}

bool CacheManageUnit::admit_prefetched(const ItemPath& block, std::uint64_t size_bytes,
                                       double now_ms) {
  return admit_background(block, size_bytes, now_ms, /*prefetched=*/true);
}

bool CacheManageUnit::admit_inherited(const ItemPath& block, std::uint64_t size_bytes,
                                      double now_ms) {
  return admit_background(block, size_bytes, now_ms, /*prefetched=*/false);
}

bool CacheManageUnit::admit_background(const ItemPath& block, std::uint64_t size_bytes,
                                       double now_ms, bool prefetched) {
  if (expired_ || size_bytes > quota_) {
    return false;
  }
  const std::string id = block.str();
  if (blocks_.count(id) > 0) {
    return false;
  }
  if (policy_ == EvictionPolicy::uniform) {
    if (used_ + size_bytes > quota_) {
      return false;
    }
    admit_block(block, size_bytes, now_ms, /*pinned=*/true, prefetched);
    return true;
  }
  while (used_ + size_bytes > quota_) {
    evict_front_group();
  }
  admit_block(block, size_bytes, now_ms, /*pinned=*/false, prefetched);
  return true;
}

void CacheManageUnit::admit_block(const ItemPath& item, std::uint64_t size, double now, bool pinned,
                                  bool prefetched) {
  const std::string id = item.str();
  ghost_.remove(id);
  CacheBlock block;
  block.stream_id = id_;
  block.item = item;
  block.size_bytes = size;
  block.last_access_ms = now;
  block.pinned = pinned;
  block.prefetched = prefetched;
  blocks_.emplace(id, std::move(block));
  used_ += size;

  const std::string group_key = group_of(item);
  auto it = groups_.find(group_key);
  if (it == groups_.end()) {
    order_.push_back(group_key);
    Group group;
    group.order_pos = std::prev(order_.end());
    it = groups_.emplace(group_key, std::move(group)).first;
  } else if (policy_ == EvictionPolicy::lru) {
    order_.splice(order_.end(), order_, it->second.order_pos);
  }
  it->second.block_ids.insert(id);
}

void CacheManageUnit::drop_block(const std::string& id, bool to_ghost) {
  const auto it = blocks_.find(id);
  if (it == blocks_.end()) {
    return;
  }
  used_ -= it->second.size_bytes;
  const std::string group_key = group_of(it->second.item);
  const auto group = groups_.find(group_key);
  group->second.block_ids.erase(id);
  if (group->second.block_ids.empty()) {
    order_.erase(group->second.order_pos);
    groups_.erase(group);
  }
  blocks_.erase(it);
  if (to_ghost) {
    ghost_.insert(id);
  }
}

std::vector<std::string> CacheManageUnit::evict_front_group() {
  std::vector<std::string> evicted;
  if (order_.empty()) {
    return evicted;
  }
  const std::string group_key = order_.front();
  const auto& ids = groups_.at(group_key).block_ids;
  evicted.assign(ids.begin(), ids.end());
  for (const auto& id : evicted) {
    drop_block(id, /*to_ghost=*/true);
  }
  return evicted;
}

std::vector<std::string> CacheManageUnit::resize_quota(std::uint64_t new_quota_bytes) {
  quota_ = new_quota_bytes;
  std::vector<std::string> evicted;
  while (used_ > quota_ && !order_.empty()) {
    auto round = evict_front_group();
    evicted.insert(evicted.end(), round.begin(), round.end());
  }
  return evicted;
}

std::vector<std::string> CacheManageUnit::expire_stream() {
  std::vector<std::string> evicted;
  evicted.reserve(blocks_.size());
  for (const auto& [id, _] : blocks_) {
    evicted.push_back(id);
  }
  std::sort(evicted.begin(), evicted.end());
  blocks_.clear();
  groups_.clear();
  order_.clear();
  ghost_.clear();
  used_ = 0;
  expired_ = true;
  return evicted;
}

void CacheManageUnit::reactivate(std::uint64_t quota_bytes, double now_ms) {
  expired_ = false;
  quota_ = quota_bytes;
  created_ms_ = now_ms;
}

std::vector<CacheBlock> CacheManageUnit::take_blocks() {
  std::vector<CacheBlock> out;
  out.reserve(blocks_.size());
  for (auto& [_, block] : blocks_) {
    out.push_back(std::move(block));
  }
  blocks_.clear();
  groups_.clear();
  order_.clear();
  used_ = 0;
  std::sort(out.begin(), out.end(),
            [](const CacheBlock& a, const CacheBlock& b) { return a.item.str() < b.item.str(); });
  return out;
}

void CacheManageUnit::prune_samples(double now_ms, double period_ms) {
  const double cutoff = now_ms - period_ms;
  while (!request_ts_.empty() && request_ts_.front() <= cutoff) {
    request_ts_.pop_front();
  }
  while (!ghost_hit_ts_.empty() && ghost_hit_ts_.front() <= cutoff) {
    ghost_hit_ts_.pop_front();
  }
}

CacheManageUnit::RateSample CacheManageUnit::sample_rates(double now_ms, double period_ms) const {
  RateSample sample;
  const double cutoff = now_ms - period_ms;
  std::uint64_t requests = 0;
  for (auto it = request_ts_.rbegin(); it != request_ts_.rend() && *it > cutoff; ++it) {
    ++requests;
  }
  std::uint64_t ghost_hits = 0;
  for (auto it = ghost_hit_ts_.rbegin(); it != ghost_hit_ts_.rend() && *it > cutoff; ++it) {
    ++ghost_hits;
  }
  sample.requests = requests;
  sample.arrival_rate_per_s = period_ms > 0 ? requests / (period_ms / 1000.0) : 0.0;
  sample.ghost_hit_freq =
      requests == 0 ? 0.0 : static_cast<double>(ghost_hits) / static_cast<double>(requests);
  return sample;
}

}  // namespace adacache
