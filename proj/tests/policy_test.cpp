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

#include <cmath>
#include <set>

#include "adacache/errors.hpp"
#include "adacache/policy.hpp"
#include "test_support.hpp"

using namespace adacache;
using namespace adacache::test;

namespace {

AccessEvent block_event(std::int64_t ts, const std::string& file, std::uint64_t block,
                        std::uint64_t block_size = 1024) {
  AccessEvent ev;
  ev.ts_ms = ts;
  ev.path = ItemPath::parse(file).with_block(block);
  ev.offset_bytes = block * block_size;
  ev.length_bytes = block_size;
  ev.job_id = "t";
  return ev;
}

std::set<std::string> target_set(const PrefetchPlan& plan) {
  std::set<std::string> out;
  for (const auto& target : plan.targets) {
    out.insert(target.str());
  }
  return out;
}

}  // namespace

TEST_CASE("sequential prefetch takes the next N siblings, clipped") {
  const auto catalog = flat_catalog("/ds", 100, 1024, 1024);
  TreeConfig tree_config;
  tree_config.window_size = 4;
  AccessStreamTree tree(tree_config, &catalog);
  PolicyConfig config;

  for (int f = 0; f <= 7; ++f) {
    tree.record_access(block_event(f, "/ds/f" + padded(f, 2), 0));
  }
  const AccessStreamNode* ds = tree.find("/ds");
  REQUIRE(ds != nullptr);

  SUBCASE("middle of the listing") {
    const auto plan = plan_prefetch_sequential(*ds, catalog, config);
    CHECK(plan.granularity == Granularity::file);
    CHECK(target_set(plan) ==
          std::set<std::string>{"/ds/f08#0", "/ds/f09#0", "/ds/f10#0", "/ds/f11#0"});
  }

  SUBCASE("final child yields an empty plan") {
    tree.record_access(block_event(100, "/ds/f99", 0));
    const auto plan = plan_prefetch_sequential(*ds, catalog, config);
    CHECK(plan.targets.empty());
  }

  SUBCASE("clipping at the end") {
    tree.record_access(block_event(100, "/ds/f98", 0));
    const auto plan = plan_prefetch_sequential(*ds, catalog, config);
    CHECK(target_set(plan) == std::set<std::string>{"/ds/f99#0"});
  }

  SUBCASE("resident targets are excluded") {
    const auto plan = plan_prefetch_sequential(*ds, catalog, config, [](const ItemPath& block) {
      return block.str() == "/ds/f09#0";
    });
    CHECK(target_set(plan) == std::set<std::string>{"/ds/f08#0", "/ds/f10#0", "/ds/f11#0"});
  }
}

TEST_CASE("block-level sequential prefetch inside one file") {
  const auto catalog = flat_catalog("/big", 2, 20 * 1024, 1024);  // 20 blocks each
  TreeConfig tree_config;
  tree_config.window_size = 4;
  AccessStreamTree tree(tree_config, &catalog);
  PolicyConfig config;
  for (int b = 0; b <= 6; ++b) {
    tree.record_access(block_event(b, "/big/f0", static_cast<std::uint64_t>(b)));
  }
  const AccessStreamNode* file = tree.find("/big/f0");
  REQUIRE(file != nullptr);
  const auto plan = plan_prefetch_sequential(*file, catalog, config);
  CHECK(plan.granularity == Granularity::block);
  CHECK(target_set(plan) ==
        std::set<std::string>{"/big/f0#7", "/big/f0#8", "/big/f0#9", "/big/f0#10"});
}

TEST_CASE("hierarchical filter expands only hot relative children") {
  const std::vector<std::string> names{"00.csv", "01.csv", "02.csv", "03.csv", "04.csv",
                                       "05.csv", "06.csv", "07.csv", "08.csv", "09.csv"};
  const auto catalog = nested_catalog("/ocean", 4, names, 1024, 1024);
  TreeConfig tree_config;
  tree_config.window_size = 2;
  AccessStreamTree tree(tree_config, &catalog);
  PolicyConfig config;

  // History: only 03.csv is touched under every month directory.
  for (int d = 0; d < 3; ++d) {
    tree.record_access(block_event(d, "/ocean/d" + std::to_string(d) + "/03.csv", 0));
  }
  const AccessStreamNode* ocean = tree.find("/ocean");
  REQUIRE(ocean != nullptr);

  PrefetchPlan raw;
  raw.granularity = Granularity::directory;
  raw.stream_prefix = "/ocean";
  raw.targets.push_back(ItemPath::parse("/ocean/d3"));

  SUBCASE("f = 1.0 child is the only expansion") {
    const auto filtered = hierarchical_filter(raw, ocean->child_freq(), catalog, config);
    CHECK(target_set(filtered) == std::set<std::string>{"/ocean/d3/03.csv#0"});
  }

  SUBCASE("below-threshold children are excluded") {
    // Dilute 03.csv to f = 0.5 by touching 04.csv equally often.
    for (int i = 0; i < 3; ++i) {
      tree.record_access(block_event(10 + i, "/ocean/d" + std::to_string(i % 3) + "/04.csv", 0));
    }
    const auto filtered = hierarchical_filter(raw, ocean->child_freq(), catalog, config);
    CHECK(filtered.targets.empty());  // both at f=0.5 < 0.8
  }

  SUBCASE("threshold zero equals the naive expansion") {
    PolicyConfig all = config;
    all.hot_child_threshold = 0.0;
    const auto filtered = hierarchical_filter(raw, ocean->child_freq(), catalog, all);
    CHECK(filtered.targets.size() == names.size());
  }

  SUBCASE("threshold one keeps only always-accessed children") {
    PolicyConfig strict = config;
    strict.hot_child_threshold = 1.0;
    const auto filtered = hierarchical_filter(raw, ocean->child_freq(), catalog, strict);
    CHECK(target_set(filtered) == std::set<std::string>{"/ocean/d3/03.csv#0"});
  }

  SUBCASE("no evidence expands naively") {
    ChildFrequencyTable empty;
    const auto filtered = hierarchical_filter(raw, empty, catalog, config);
    CHECK(filtered.targets.size() == names.size());
  }
}

TEST_CASE("hierarchical filter recurses to the block level inside hot files") {
  // Three-block files; the workload only ever touches block 0.
  const auto catalog = nested_catalog("/logs", 4, {"hot.bin", "cold.bin"}, 3 * 1024, 1024);
  TreeConfig tree_config;
  tree_config.window_size = 2;
  AccessStreamTree tree(tree_config, &catalog);
  for (int d = 0; d < 3; ++d) {
    tree.record_access(block_event(d, "/logs/d" + std::to_string(d) + "/hot.bin", 0));
  }
  const AccessStreamNode* logs = tree.find("/logs");
  REQUIRE(logs != nullptr);

  PrefetchPlan raw;
  raw.granularity = Granularity::directory;
  raw.stream_prefix = "/logs";
  raw.targets.push_back(ItemPath::parse("/logs/d3"));

  PolicyConfig config;
  const auto filtered = hierarchical_filter(raw, logs->child_freq(), catalog, config);
  CHECK(target_set(filtered) == std::set<std::string>{"/logs/d3/hot.bin#0"});
}

TEST_CASE("statistical prefetch gates on the expected hit ratio") {
  const std::uint64_t gib = 1024ULL * 1024 * 1024;
  const auto catalog = flat_catalog("/train", 10, gib, 256 * 1024 * 1024);
  TreeConfig tree_config;
  tree_config.window_size = 2;
  AccessStreamTree tree(tree_config, &catalog);
  PolicyConfig config;
  tree.record_access(block_event(0, "/train/f0", 0, 256 * 1024 * 1024));
  const AccessStreamNode* train = tree.find("/train");
  REQUIRE(train != nullptr);
  const std::uint64_t dataset = catalog.subtree_bytes("/train");
  REQUIRE(dataset == 10 * gib);

  SUBCASE("boundary inclusive at 0.8") {
    const auto plan = plan_prefetch_random(*train, 8 * gib, dataset, catalog, config);
    CHECK_FALSE(plan.targets.empty());
    std::uint64_t planned = 0;
    for (const auto& target : plan.targets) {
      planned += catalog.block_bytes(target.file_str(), *target.block_index);
    }
    CHECK(planned <= 8 * gib);
    CHECK(planned == 8 * gib);  // block-aligned quota
  }

  SUBCASE("below threshold plans nothing") {
    const auto plan = plan_prefetch_random(*train, 2 * gib, dataset, catalog, config);
    CHECK(plan.targets.empty());
  }

  SUBCASE("dataset within quota plans everything non-resident") {
    const auto plan = plan_prefetch_random(*train, 12 * gib, dataset, catalog, config);
    CHECK(plan.targets.size() == catalog.subtree_block_count("/train"));
  }
}

TEST_CASE("policy selection is total over the three patterns") {
  const auto seq = select_policies(PatternLabel::sequential);
  CHECK(seq.prefetch == PrefetchKind::stride);
  CHECK(seq.eviction == EvictionPolicy::eager);
  const auto rnd = select_policies(PatternLabel::random);
  CHECK(rnd.prefetch == PrefetchKind::statistical);
  CHECK(rnd.eviction == EvictionPolicy::uniform);
  const auto skw = select_policies(PatternLabel::skewed);
  CHECK(skw.prefetch == PrefetchKind::none);
  CHECK(skw.eviction == EvictionPolicy::lru);
}

TEST_CASE("TTL fitting") {
  PolicyConfig config;

  SUBCASE("constant gaps have zero sigma") {
    const std::vector<double> gaps(10, 2000.0);
    const auto model = fit_ttl(gaps, config);
    CHECK(model.mu_ms == doctest::Approx(2000.0));
    CHECK(model.sigma_ms == doctest::Approx(0.0));
    CHECK(model.ttl_ms() == doctest::Approx(62000.0));
  }

  SUBCASE("two-point sample with engineered mean and deviation") {
    const double d = 2500.0 * std::sqrt(2.0);
    const std::vector<double> gaps{10000.0 - d, 10000.0 + d};
    const auto model = fit_ttl(gaps, config);
    CHECK(model.mu_ms == doctest::Approx(10000.0));
    CHECK(model.sigma_ms == doctest::Approx(5000.0));
    CHECK(model.ttl_ms() == doctest::Approx(60000.0 + 10000.0 + 2.326 * 5000.0));
  }

  SUBCASE("translation consistency") {
    Rng rng(77);
    std::vector<double> gaps(20);
    for (auto& gap : gaps) {
      gap = static_cast<double>(rng.uniform_u64(5000));
    }
    const auto base = fit_ttl(gaps, config);
    for (auto& gap : gaps) {
      gap += 1234.5;
    }
    const auto shifted = fit_ttl(gaps, config);
    CHECK(shifted.ttl_ms() == doctest::Approx(base.ttl_ms() + 1234.5).epsilon(1e-9));
  }

  SUBCASE("insufficient samples") {
    const std::vector<double> one{5.0};
    CHECK_THROWS_AS(fit_ttl(one, config), InsufficientDataError);
  }
}

TEST_CASE("stream expiry against the fitted TTL") {
  TtlModel model;
  model.mu_ms = 26000.0;
  model.sigma_ms = 0.0;
  model.z = 2.326;
  model.base_ms = 60000.0;
  CHECK(model.ttl_ms() == doctest::Approx(86000.0));

  CHECK_FALSE(check_stream_expiry(0.0, 60000.0, model));
  CHECK(check_stream_expiry(0.0, 87000.0, model));
  CHECK_FALSE(check_stream_expiry(1000.0, 1000.0, model));
}
