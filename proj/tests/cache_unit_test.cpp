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

#include <doctest.h>

#include <vector>

#include "adacache/cache_unit.hpp"
#include "test_support.hpp"

using namespace adacache;
using namespace adacache::test;

namespace {

ItemPath blk(const std::string& file, std::uint64_t index) {
  return ItemPath::parse(file).with_block(index);
}

constexpr std::uint64_t kB = 1024;  // one test block

}  // namespace

TEST_CASE("hits, misses, and ghost hits") {
  CacheManageUnit unit("/ds", 2 * kB, EvictionPolicy::lru, 100, /*block_granularity=*/true);

  CHECK(unit.access(blk("/ds/a", 0), kB, 0) == AccessOutcome::miss);
  CHECK(unit.access(blk("/ds/a", 0), kB, 1) == AccessOutcome::hit);
  CHECK(unit.access(blk("/ds/b", 0), kB, 2) == AccessOutcome::miss);
  // Capacity reached: c evicts the LRU victim a into the ghost window.
  CHECK(unit.access(blk("/ds/c", 0), kB, 3) == AccessOutcome::miss);
  CHECK_FALSE(unit.resident(blk("/ds/a", 0)));
  CHECK(unit.buffer_window().contains("/ds/a#0"));
  CHECK(unit.access(blk("/ds/a", 0), kB, 4) == AccessOutcome::ghost_hit_miss);

  CHECK(unit.stats().hits == 1);
  CHECK(unit.stats().misses == 4);
  CHECK(unit.stats().ghost_hits == 1);
  CHECK(unit.stats().hits + unit.stats().misses == 5);  // conservation
}

TEST_CASE("ghost window never intersects the resident set and stays bounded") {
  CacheManageUnit unit("/ds", 3 * kB, EvictionPolicy::lru, 4, true);
  for (int i = 0; i < 40; ++i) {
    unit.access(blk("/ds/f" + std::to_string(i % 10), 0), kB, i);
    CHECK(unit.buffer_window().size() <= 4);
  }
  for (int i = 0; i < 10; ++i) {
    const auto path = blk("/ds/f" + std::to_string(i), 0);
    if (unit.resident(path)) {
      CHECK_FALSE(unit.buffer_window().contains(path.str()));
    }
  }
}

TEST_CASE("uniform pins until full and never thrashes") {
  CacheManageUnit unit("/ds", 2 * kB, EvictionPolicy::uniform, 100, true);
  CHECK(unit.access(blk("/ds/a", 0), kB, 0) == AccessOutcome::miss);
  CHECK(unit.access(blk("/ds/b", 0), kB, 1) == AccessOutcome::miss);
  // Full: further blocks bypass without evicting pinned residents.
  CHECK(unit.access(blk("/ds/c", 0), kB, 2) == AccessOutcome::miss);
  CHECK(unit.resident(blk("/ds/a", 0)));
  CHECK(unit.resident(blk("/ds/b", 0)));
  CHECK_FALSE(unit.resident(blk("/ds/c", 0)));
  CHECK(unit.access(blk("/ds/a", 0), kB, 3) == AccessOutcome::hit);
  CHECK(unit.used_bytes() == 2 * kB);
}

TEST_CASE("eager eviction drops blocks after they are served") {
  CacheManageUnit unit("/seq", 10 * kB, EvictionPolicy::eager, 100, true);

  // Demand miss: served then dropped; net effect is a ghost entry.
  CHECK(unit.access(blk("/seq/a", 0), kB, 0) == AccessOutcome::miss);
  CHECK(unit.used_bytes() == 0);
  CHECK(unit.buffer_window().contains("/seq/a#0"));

  // Prefetched blocks stay resident until served once.
  CHECK(unit.admit_prefetched(blk("/seq/b", 0), kB, 1));
  CHECK(unit.resident(blk("/seq/b", 0)));
  CHECK(unit.access(blk("/seq/b", 0), kB, 2) == AccessOutcome::hit);
  CHECK_FALSE(unit.resident(blk("/seq/b", 0)));
  CHECK(unit.used_bytes() == 0);
  CHECK(unit.stats().prefetch_used_bytes == kB);
}

TEST_CASE("blocks larger than the quota bypass the cache") {
  CacheManageUnit unit("/ds", 2 * kB, EvictionPolicy::lru, 100, true);
  CHECK(unit.access(blk("/ds/huge", 0), 5 * kB, 0) == AccessOutcome::miss);
  CHECK(unit.used_bytes() == 0);
  CHECK(unit.stats().bypasses == 1);
  CHECK_FALSE(unit.admit_prefetched(blk("/ds/huge", 1), 5 * kB, 1));
}

TEST_CASE("resize_quota shrinks under the unit's own policy") {
  SUBCASE("lru evicts least-recent first") {
    CacheManageUnit unit("/ds", 10 * kB, EvictionPolicy::lru, 100, true);
    for (int i = 0; i < 10; ++i) {
      unit.access(blk("/ds/f" + std::to_string(i), 0), kB, i);
    }
    const auto evicted = unit.resize_quota(6 * kB);
    CHECK(evicted.size() == 4);
    // Oracle: the four least recently used blocks are f0..f3.
    CHECK(evicted == std::vector<std::string>{"/ds/f0#0", "/ds/f1#0", "/ds/f2#0", "/ds/f3#0"});
    CHECK(unit.used_bytes() == 6 * kB);
    for (const auto& id : evicted) {
      CHECK(unit.buffer_window().contains(id));
    }
  }

  SUBCASE("uniform evicts pinned blocks in admission order") {
    CacheManageUnit unit("/ds", 4 * kB, EvictionPolicy::uniform, 100, true);
    for (int i = 0; i < 4; ++i) {
      unit.access(blk("/ds/f" + std::to_string(i), 0), kB, i);
    }
    // Touch f0 again; admission order must still win over recency.
    unit.access(blk("/ds/f0", 0), kB, 10);
    const auto evicted = unit.resize_quota(2 * kB);
    CHECK(evicted == std::vector<std::string>{"/ds/f0#0", "/ds/f1#0"});
  }

  SUBCASE("growth evicts nothing") {
    CacheManageUnit unit("/ds", 2 * kB, EvictionPolicy::lru, 100, true);
    unit.access(blk("/ds/a", 0), kB, 0);
    CHECK(unit.resize_quota(10 * kB).empty());
    CHECK(unit.resident(blk("/ds/a", 0)));
  }
}

TEST_CASE("expire_stream evicts everything and the unit reactivates") {
  CacheManageUnit unit("/train", 1000 * kB, EvictionPolicy::uniform, 100, true);
  for (int i = 0; i < 1000; ++i) {
    unit.access(blk("/train/f" + std::to_string(i), 0), kB, i);
  }
  CHECK(unit.used_bytes() == 1000 * kB);
  const auto evicted = unit.expire_stream();
  CHECK(evicted.size() == 1000);
  CHECK(unit.used_bytes() == 0);
  CHECK(unit.expired());
  CHECK(unit.stats().misses == 1000);  // statistics survive

  CHECK(unit.expire_stream().empty());

  unit.reactivate(2 * kB, 5000);
  CHECK_FALSE(unit.expired());
  CHECK(unit.quota_bytes() == 2 * kB);
}

TEST_CASE("group granularity evicts whole files for dataset-level streams") {
  CacheManageUnit unit("/ds", 4 * kB, EvictionPolicy::lru, 100, /*block_granularity=*/false);
  // Two 2-block files fill the quota.
  unit.access(blk("/ds/f0", 0), kB, 0);
  unit.access(blk("/ds/f0", 1), kB, 1);
  unit.access(blk("/ds/f1", 0), kB, 2);
  unit.access(blk("/ds/f1", 1), kB, 3);
  CHECK(unit.used_bytes() == 4 * kB);
  // A third file evicts the least-recent group (f0) entirely.
  unit.access(blk("/ds/f2", 0), kB, 4);
  CHECK_FALSE(unit.resident(blk("/ds/f0", 0)));
  CHECK_FALSE(unit.resident(blk("/ds/f0", 1)));
  CHECK(unit.resident(blk("/ds/f1", 0)));
  CHECK(unit.resident(blk("/ds/f2", 0)));
}

TEST_CASE("policy switches keep residents and re-pin appropriately") {
  CacheManageUnit unit("/ds", 4 * kB, EvictionPolicy::lru, 100, true);
  unit.access(blk("/ds/a", 0), kB, 0);
  unit.set_policy(EvictionPolicy::uniform);
  CHECK(unit.resident(blk("/ds/a", 0)));
  unit.set_policy(EvictionPolicy::lru);
  CHECK(unit.resident(blk("/ds/a", 0)));
}

TEST_CASE("isolation: a unit's outcomes are independent of other units") {
  Rng rng(99);
  std::vector<std::pair<int, std::uint64_t>> interleaved;  // (unit, file index)
  for (int i = 0; i < 2000; ++i) {
    interleaved.emplace_back(static_cast<int>(rng.uniform_u64(2)), rng.uniform_u64(30));
  }

  CacheManageUnit a1("/a", 8 * kB, EvictionPolicy::lru, 50, true);
  CacheManageUnit b1("/b", 8 * kB, EvictionPolicy::lru, 50, true);
  std::vector<AccessOutcome> a_mixed;
  std::vector<AccessOutcome> b_mixed;
  int t = 0;
  for (const auto& [which, f] : interleaved) {
    const auto path = blk((which == 0 ? "/a/f" : "/b/f") + std::to_string(f), 0);
    if (which == 0) {
      a_mixed.push_back(a1.access(path, kB, t++));
    } else {
      b_mixed.push_back(b1.access(path, kB, t++));
    }
  }

  CacheManageUnit a2("/a", 8 * kB, EvictionPolicy::lru, 50, true);
  std::vector<AccessOutcome> a_solo;
  t = 0;
  for (const auto& [which, f] : interleaved) {
    if (which == 0) {
      a_solo.push_back(a2.access(blk("/a/f" + std::to_string(f), 0), kB, t++));
    }
  }
  CHECK(a_mixed == a_solo);
}

TEST_CASE("lru, fifo, and uniform match brute-force references") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    CacheManageUnit lru("/x", 16 * kB, EvictionPolicy::lru, 64, true);
    CacheManageUnit fifo("/x", 16 * kB, EvictionPolicy::fifo, 64, true);
    CacheManageUnit uniform("/x", 16 * kB, EvictionPolicy::uniform, 64, true);
    RefLru ref_lru(16 * kB);
    RefFifo ref_fifo(16 * kB);
    RefUniform ref_uniform(16 * kB);
    for (int i = 0; i < 2000; ++i) {
      // Zipf-ish skew plus uniform tail exercises both hit and churn paths.
      const std::uint64_t f =
          rng.uniform_u64(2) == 0 ? rng.uniform_u64(8) : rng.uniform_u64(64);
      const auto path = blk("/x/f" + std::to_string(f), 0);
      CHECK((lru.access(path, kB, i) == AccessOutcome::hit) == ref_lru.access(path.str(), kB));
      CHECK((fifo.access(path, kB, i) == AccessOutcome::hit) == ref_fifo.access(path.str(), kB));
      CHECK((uniform.access(path, kB, i) == AccessOutcome::hit) ==
            ref_uniform.access(path.str(), kB));
    }
  }
}
