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

#include "adacache/simulator.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "adacache/cache_unit.hpp"
#include "adacache/errors.hpp"
#include "adacache/pattern.hpp"
#include "adacache/policy.hpp"
#include "adacache/stream_tree.hpp"

namespace adacache {

namespace {

nlohmann::ordered_json opt_to_json(const std::optional<double>& value) {
  if (value) {
    return *value;
  }
  return nullptr;
}

std::optional<double> opt_from_json(const nlohmann::json& value) {
  if (value.is_null()) {
    return std::nullopt;
  }
  return value.get<double>();
}

}  // namespace

nlohmann::ordered_json SimReport::to_json() const {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json aggregate;
  aggregate["events"] = total_events;
  aggregate["hits"] = hits;
  aggregate["misses"] = misses;
  aggregate["ghost_hits"] = ghost_hits;
  aggregate["chr"] = opt_to_json(overall_chr);
  aggregate["avg_jct_ms"] = opt_to_json(avg_jct_ms);
  aggregate["prefetch_fetched_bytes"] = prefetch_fetched_bytes;
  aggregate["prefetch_used_bytes"] = prefetch_used_bytes;
  doc["aggregate"] = std::move(aggregate);

  nlohmann::ordered_json jobs = nlohmann::ordered_json::object();
  for (const auto& [id, job] : per_job) {
    nlohmann::ordered_json j;
    j["events"] = job.events;
    j["hits"] = job.hits;
    j["misses"] = job.misses;
    j["chr"] = opt_to_json(job.chr);
    j["jct_ms"] = job.jct_ms;
    j["first_ms"] = job.first_ms;
    j["done_ms"] = job.done_ms;
    jobs[id] = std::move(j);
  }
  doc["per_job"] = std::move(jobs);

  nlohmann::ordered_json streams = nlohmann::ordered_json::object();
  for (const auto& [prefix, stream] : per_stream) {
    nlohmann::ordered_json s;
    s["pattern"] = stream.pattern;
    s["transition_ms"] = stream.transition_ms;
    nlohmann::ordered_json history = nlohmann::ordered_json::array();
    for (const auto& [t, label] : stream.label_history) {
      history.push_back({{"t_ms", t}, {"label", label}});
    }
    s["label_history"] = std::move(history);
    streams[prefix] = std::move(s);
  }
  doc["per_stream"] = std::move(streams);

  nlohmann::ordered_json units = nlohmann::ordered_json::object();
  for (const auto& [id, unit] : per_unit) {
    nlohmann::ordered_json u;
    u["hits"] = unit.hits;
    u["misses"] = unit.misses;
    u["ghost_hits"] = unit.ghost_hits;
    u["quota_bytes"] = unit.quota_bytes;
    u["used_bytes"] = unit.used_bytes;
    u["policy"] = unit.policy;
    u["pattern"] = unit.pattern;
    u["prefetch_fetched_bytes"] = unit.prefetch_fetched_bytes;
    u["prefetch_used_bytes"] = unit.prefetch_used_bytes;
    u["expired"] = unit.expired;
    units[id] = std::move(u);
  }
  doc["per_unit"] = std::move(units);

  nlohmann::ordered_json allocation = nlohmann::ordered_json::array();
  for (const auto& point : allocation_timeline) {
    nlohmann::ordered_json p;
    p["t_ms"] = point.t_ms;
    p["free_pool_bytes"] = point.free_pool_bytes;
    nlohmann::ordered_json per_unit_json = nlohmann::ordered_json::object();
    for (const auto& [id, u] : point.units) {
      per_unit_json[id] = {{"quota_bytes", u.quota_bytes},
                           {"benefit_per_s", u.benefit_per_s},
                           {"warming", u.warming}};
    }
    p["units"] = std::move(per_unit_json);
    nlohmann::ordered_json transfers = nlohmann::ordered_json::array();
    for (const auto& transfer : point.transfers) {
      transfers.push_back({{"from", transfer.from_unit},
                           {"to", transfer.to_unit},
                           {"bytes", transfer.bytes}});
    }
    p["transfers"] = std::move(transfers);
    allocation.push_back(std::move(p));
  }
  doc["allocation_timeline"] = std::move(allocation);

  nlohmann::ordered_json chr = nlohmann::ordered_json::array();
  for (const auto& point : chr_timeline) {
    nlohmann::ordered_json p;
    p["t_ms"] = point.t_ms;
    p["overall"] = opt_to_json(point.overall);
    nlohmann::ordered_json per_job_json = nlohmann::ordered_json::object();
    for (const auto& [id, value] : point.per_job) {
      per_job_json[id] = opt_to_json(value);
    }
    p["per_job"] = std::move(per_job_json);
    chr.push_back(std::move(p));
  }
  doc["chr_timeline"] = std::move(chr);
  return doc;
}

SimReport SimReport::from_json(const nlohmann::json& doc) {
  SimReport report;
  const auto& aggregate = doc.at("aggregate");
  report.total_events = aggregate.at("events").get<std::uint64_t>();
  report.hits = aggregate.at("hits").get<std::uint64_t>();
  report.misses = aggregate.at("misses").get<std::uint64_t>();
  report.ghost_hits = aggregate.at("ghost_hits").get<std::uint64_t>();
  report.overall_chr = opt_from_json(aggregate.at("chr"));
  report.avg_jct_ms = opt_from_json(aggregate.at("avg_jct_ms"));
  report.prefetch_fetched_bytes = aggregate.at("prefetch_fetched_bytes").get<std::uint64_t>();
  report.prefetch_used_bytes = aggregate.at("prefetch_used_bytes").get<std::uint64_t>();

  for (const auto& [id, j] : doc.at("per_job").items()) {
    JobReport job;
    job.events = j.at("events").get<std::uint64_t>();
    job.hits = j.at("hits").get<std::uint64_t>();
    job.misses = j.at("misses").get<std::uint64_t>();
    job.chr = opt_from_json(j.at("chr"));
    job.jct_ms = j.at("jct_ms").get<double>();
    job.first_ms = j.at("first_ms").get<double>();
    job.done_ms = j.at("done_ms").get<double>();
    report.per_job[id] = std::move(job);
  }
  for (const auto& [prefix, s] : doc.at("per_stream").items()) {
    StreamReport stream;
    stream.pattern = s.at("pattern").get<std::string>();
    stream.transition_ms = s.at("transition_ms").get<double>();
    for (const auto& h : s.at("label_history")) {
      stream.label_history.emplace_back(h.at("t_ms").get<double>(),
                                        h.at("label").get<std::string>());
    }
    report.per_stream[prefix] = std::move(stream);
  }
  for (const auto& [id, u] : doc.at("per_unit").items()) {
    UnitReport unit;
    unit.hits = u.at("hits").get<std::uint64_t>();
    unit.misses = u.at("misses").get<std::uint64_t>();
    unit.ghost_hits = u.at("ghost_hits").get<std::uint64_t>();
    unit.quota_bytes = u.at("quota_bytes").get<std::uint64_t>();
    unit.used_bytes = u.at("used_bytes").get<std::uint64_t>();
    unit.policy = u.at("policy").get<std::string>();
    unit.pattern = u.at("pattern").get<std::string>();
    unit.prefetch_fetched_bytes = u.at("prefetch_fetched_bytes").get<std::uint64_t>();
    unit.prefetch_used_bytes = u.at("prefetch_used_bytes").get<std::uint64_t>();
    unit.expired = u.at("expired").get<bool>();
    report.per_unit[id] = std::move(unit);
  }
  for (const auto& p : doc.at("allocation_timeline")) {
    AllocationPoint point;
    point.t_ms = p.at("t_ms").get<double>();
    point.free_pool_bytes = p.at("free_pool_bytes").get<std::uint64_t>();
    for (const auto& [id, u] : p.at("units").items()) {
      AllocationUnitPoint unit;
      unit.quota_bytes = u.at("quota_bytes").get<std::uint64_t>();
      unit.benefit_per_s = u.at("benefit_per_s").get<double>();
      unit.warming = u.at("warming").get<bool>();
      point.units[id] = unit;
    }
    for (const auto& t : p.at("transfers")) {
      point.transfers.push_back({t.at("from").get<std::string>(), t.at("to").get<std::string>(),
                                 t.at("bytes").get<std::uint64_t>()});
    }
    report.allocation_timeline.push_back(std::move(point));
  }
  for (const auto& p : doc.at("chr_timeline")) {
    ChrPoint point;
    point.t_ms = p.at("t_ms").get<double>();
    point.overall = opt_from_json(p.at("overall"));
    for (const auto& [id, value] : p.at("per_job").items()) {
      point.per_job[id] = opt_from_json(value);
    }
    report.chr_timeline.push_back(std::move(point));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

class Simulator::Impl {
 public:
  Impl(const NamespaceCatalog& catalog, const SimConfig& config)
      : catalog_(catalog), config_(config), tree_(config.tree, &catalog) {}

  SimReport run(std::span<const AccessEvent> events);

 private:
  struct JobState {
    std::string id;
    std::vector<const AccessEvent*> events;
    std::size_t next = 0;
    double next_issue_ms = 0.0;
    double first_ms = 0.0;
    double done_ms = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
  };

  struct PrefetchItem {
    ItemPath block;
    std::string unit_id;
    std::uint64_t size = 0;
    double enqueue_ms = 0.0;
  };

  struct Arrival {
    double at_ms;
    std::uint64_t seq;
    PrefetchItem item;

    bool operator>(const Arrival& other) const {
      return at_ms > other.at_ms || (at_ms == other.at_ms && seq > other.seq);
    }
  };

  double transfer_ms(std::uint64_t size) const {
    return static_cast<double>(size) * 8.0 / config_.latency.remote_bandwidth_bps * 1000.0;
  }

  bool adaptive_policy() const { return config_.policy_mode == PolicyMode::adaptive; }

  void validate(std::span<const AccessEvent> events) const;
  ItemPath block_of(const AccessEvent& event) const;

  CacheManageUnit* find_owner(const ItemPath& block, double now_ms);
  CacheManageUnit* shared_unit();
  std::uint64_t carve_quota(std::uint64_t target);
  void create_unit(AccessStreamNode& node, PatternLabel label, double now_ms);
  void apply_pattern(CacheManageUnit& unit, AccessStreamNode& node, PatternLabel label,
                     double now_ms);
  void refresh_unit(CacheManageUnit& unit, double now_ms);
  void handle_transition(AccessStreamNode& node, double now_ms);
  void note_label(const std::string& prefix, PatternLabel label, double now_ms, bool transition);

  void enqueue_prefetch(CacheManageUnit& unit, const ItemPath& block, double now_ms);
  void plan_statistical(CacheManageUnit& unit, AccessStreamNode& node, double now_ms);
  void plan_after_access(CacheManageUnit* unit, const ItemPath& block, double now_ms);
  ResidencyProbe residency_probe(CacheManageUnit& unit) const;

  void advance_prefetch(double to_ms);
  void process_arrivals(double to_ms);
  double serve_demand_fetch(const ItemPath& block, std::uint64_t size, double now_ms);

  void run_tick(double t_ms, std::vector<QuotaTransfer> pending_markers);
  std::vector<QuotaTransfer> check_expiries(double t_ms);
  void sample_chr(double t_ms);

  std::optional<double> job_chr(const JobState& job) const {
    const std::uint64_t total = job.hits + job.misses;
    if (total == 0) {
      return std::nullopt;
    }
    return static_cast<double>(job.hits) / static_cast<double>(total);
  }

  const NamespaceCatalog& catalog_;
  const SimConfig& config_;
  AccessStreamTree tree_;

  std::map<std::string, std::unique_ptr<CacheManageUnit>> units_;
  std::uint64_t free_pool_ = 0;

  // Remote channel: bandwidth is the serialized resource; propagation delay
  // overlaps. Prefetch transfers are scheduled round-robin across partitions
  // so one stream's bulk prefetch cannot starve another's.
  double channel_busy_until_ = 0.0;
  double next_prefetch_allowed_ = 0.0;
  std::map<std::string, std::deque<PrefetchItem>> prefetch_queues_;
  std::string rr_cursor_;
  std::priority_queue<Arrival, std::vector<Arrival>, std::greater<>> arrivals_;
  std::uint64_t arrival_seq_ = 0;
  std::unordered_set<std::string> queued_or_inflight_;
  std::unordered_map<std::string, double> inflight_arrival_;
  std::unordered_set<std::string> cancelled_;

  // Stride run detection for the JuiceFS-like baseline prefetcher.
  std::unordered_map<std::string, std::pair<std::int64_t, std::uint32_t>> stride_runs_;

  std::map<std::string, JobState> jobs_;
  std::map<std::string, StreamReport> stream_reports_;
  std::vector<AllocationPoint> allocation_timeline_;
  std::vector<ChrPoint> chr_timeline_;
  std::uint64_t total_hits_ = 0;
  std::uint64_t total_misses_ = 0;
  std::uint64_t total_prefetch_fetched_ = 0;
};

void Simulator::Impl::validate(std::span<const AccessEvent> events) const {
  for (const auto& event : events) {
    const ItemPath block = block_of(event);
    if (!catalog_.resolves(block)) {
      throw LookupError("trace path does not resolve in catalog: " + block.str());
    }
    const std::uint64_t size = catalog_.file_size(block.file_str());
    if (event.offset_bytes + event.length_bytes > size) {
      throw LookupError("read beyond end of " + block.file_str() + " (offset " +
                        std::to_string(event.offset_bytes) + " + length " +
                        std::to_string(event.length_bytes) + " > " + std::to_string(size) + ")");
    }
  }
  if (adaptive_policy() && config_.cache_capacity_bytes < config_.allocator.min_share_bytes) {
    throw ConfigError("cache capacity is below one minimum share");
  }
}

ItemPath Simulator::Impl::block_of(const AccessEvent& event) const {
  if (event.path.block_index) {
    return event.path;
  }
  return event.path.with_block(event.offset_bytes / catalog_.block_size_bytes());
}

CacheManageUnit* Simulator::Impl::shared_unit() {
  auto it = units_.find("/");
  if (it == units_.end()) {
    EvictionPolicy policy = EvictionPolicy::lru;
    switch (config_.policy_mode) {
      case PolicyMode::lru:
        policy = EvictionPolicy::lru;
        break;
      case PolicyMode::fifo:
        policy = EvictionPolicy::fifo;
        break;
      case PolicyMode::uniform:
        policy = EvictionPolicy::uniform;
        break;
      case PolicyMode::adaptive:
        break;
    }
    auto unit = std::make_unique<CacheManageUnit>(
        "/", config_.cache_capacity_bytes, policy, config_.buffer_window_blocks,
        /*block_granularity=*/true);
    free_pool_ = 0;
    it = units_.emplace("/", std::move(unit)).first;
  }
  return it->second.get();
}

CacheManageUnit* Simulator::Impl::find_owner(const ItemPath& block, double now_ms) {
  if (!adaptive_policy()) {
    return shared_unit();
  }
  std::string prefix;
  std::vector<std::string> prefixes;
  prefixes.reserve(block.components.size());
  for (const auto& seg : block.components) {
    prefix += '/';
    prefix += seg;
    prefixes.push_back(prefix);
  }
  for (auto it = prefixes.rbegin(); it != prefixes.rend(); ++it) {
    const auto found = units_.find(*it);
    if (found != units_.end()) {
      CacheManageUnit* unit = found->second.get();
      if (unit->expired()) {
        const std::uint64_t quota = carve_quota(config_.allocator.min_share_bytes);
        unit->reactivate(quota, now_ms);
        if (unit->pattern() && *unit->pattern() == PatternLabel::random) {
          if (AccessStreamNode* node = tree_.find(unit->id())) {
            plan_statistical(*unit, *node, now_ms);
          }
        }
      }
      return unit;
    }
  }
  return nullptr;
}

std::uint64_t Simulator::Impl::carve_quota(std::uint64_t target) {
  std::uint64_t granted = std::min(free_pool_, target);
  free_pool_ -= granted;
  if (granted >= target) {
    return granted;
  }
  std::uint64_t need = target - granted;
  // Take from units holding more than the new equal share, in id order.
  for (auto& [id, unit] : units_) {
    if (need == 0) {
      break;
    }
    if (unit->expired()) {
      continue;
    }
    const std::uint64_t floor_bytes = std::max(target, config_.allocator.min_share_bytes);
    if (unit->quota_bytes() <= floor_bytes) {
      continue;
    }
    const std::uint64_t take = std::min(need, unit->quota_bytes() - floor_bytes);
    unit->resize_quota(unit->quota_bytes() - take);
    granted += take;
    need -= take;
  }
  return granted;
}

void Simulator::Impl::note_label(const std::string& prefix, PatternLabel label, double now_ms,
                                 bool transition) {
  auto& report = stream_reports_[prefix];
  report.pattern = to_string(label);
  if (transition) {
    report.transition_ms = now_ms;
  }
  if (report.label_history.empty() || report.label_history.back().second != to_string(label)) {
    report.label_history.emplace_back(now_ms, to_string(label));
  }
}

void Simulator::Impl::apply_pattern(CacheManageUnit& unit, AccessStreamNode& node,
                                    PatternLabel label, double now_ms) {
  unit.set_pattern(label);
  unit.set_policy(select_policies(label).eviction);
  if (config_.ttl_mode == TtlMode::fixed) {
    unit.set_ttl(TtlModel{0.0, 0.0, 0.0, config_.fixed_ttl_ms});
  } else if (config_.ttl_mode == TtlMode::adaptive && label == PatternLabel::random) {
    const auto gaps = node.window_temporal_gaps_ms();
    if (gaps.size() >= 2) {
      unit.set_ttl(fit_ttl(gaps, config_.policy));
    }
  } else if (label != PatternLabel::random && config_.ttl_mode == TtlMode::adaptive) {
    unit.clear_ttl();
  }
  if (label == PatternLabel::random && config_.prefetch_mode == PrefetchModeFlag::adaptive) {
    plan_statistical(unit, node, now_ms);
  }
}

void Simulator::Impl::create_unit(AccessStreamNode& node, PatternLabel label, double now_ms) {
  const std::string id = node.path_str();

  // Absorb units of descendant streams: one partition per dataset root.
  std::vector<std::string> absorbed;
  const std::string child_prefix = id == "/" ? "/" : id + "/";
  for (const auto& [unit_id, _] : units_) {
    if (unit_id.size() > child_prefix.size() &&
        unit_id.compare(0, child_prefix.size(), child_prefix) == 0) {
      absorbed.push_back(unit_id);
    }
  }

  std::uint64_t quota = 0;
  std::vector<CacheBlock> inherited;
  for (const auto& unit_id : absorbed) {
    auto it = units_.find(unit_id);
    quota += it->second->quota_bytes();
    auto blocks = it->second->take_blocks();
    inherited.insert(inherited.end(), blocks.begin(), blocks.end());
    if (AccessStreamNode* old_node = tree_.find(unit_id)) {
      tree_.set_unit_id(*old_node, "");
    }
    units_.erase(it);
    // Pending prefetches follow the blocks into the absorbing partition.
    const auto queued = prefetch_queues_.find(unit_id);
    if (queued != prefetch_queues_.end()) {
      auto& target = prefetch_queues_[id];
      for (auto& item : queued->second) {
        item.unit_id = id;
        target.push_back(std::move(item));
      }
      prefetch_queues_.erase(unit_id);
    }
  }

  if (absorbed.empty()) {
    const std::size_t active =
        static_cast<std::size_t>(std::count_if(units_.begin(), units_.end(), [](const auto& kv) {
          return !kv.second->expired();
        }));
    const std::uint64_t target =
        std::max(config_.allocator.min_share_bytes,
                 config_.cache_capacity_bytes / static_cast<std::uint64_t>(active + 1));
    quota = carve_quota(target);
  } else if (quota < config_.allocator.min_share_bytes) {
    quota += carve_quota(config_.allocator.min_share_bytes - quota);
  }

  auto unit = std::make_unique<CacheManageUnit>(id, quota, select_policies(label).eviction,
                                                config_.buffer_window_blocks,
                                                /*block_granularity=*/false);
  unit->note_created(now_ms);
  CacheManageUnit* raw = unit.get();
  units_.emplace(id, std::move(unit));
  tree_.set_unit_id(node, id);

  // Re-admit inherited blocks oldest-first so recency order carries over.
  std::sort(inherited.begin(), inherited.end(), [](const CacheBlock& a, const CacheBlock& b) {
    return a.last_access_ms < b.last_access_ms ||
           (a.last_access_ms == b.last_access_ms && a.item.str() < b.item.str());
  });
  for (const auto& block : inherited) {
    raw->admit_inherited(block.item, block.size_bytes, block.last_access_ms);
  }

  apply_pattern(*raw, node, label, now_ms);
}

void Simulator::Impl::handle_transition(AccessStreamNode& node, double now_ms) {
  const std::uint64_t c = tree_.dataset_item_count(node);
  const auto window = node.window().snapshot();
  const PatternLabel label = classify(window, c, config_.recognizer);
  node.set_pattern(label);
  note_label(node.path_str(), label, now_ms, /*transition=*/true);

  if (!adaptive_policy()) {
    return;
  }
  // The nearest ancestor partition keeps ownership; deeper labels are
  // recorded but do not split the dataset's cache space.
  const std::string& id = node.path_str();
  for (const auto& [unit_id, _] : units_) {
    if (id.size() > unit_id.size() && id.compare(0, unit_id.size(), unit_id) == 0 &&
        (unit_id == "/" || id[unit_id.size()] == '/')) {
      return;
    }
  }
  create_unit(node, label, now_ms);
}

void Simulator::Impl::refresh_unit(CacheManageUnit& unit, double now_ms) {
  AccessStreamNode* node = tree_.find(unit.id());
  if (node == nullptr || unit.expired()) {
    return;
  }
  if (node->window().size() >= 2) {
    const std::uint64_t c = tree_.dataset_item_count(*node);
    const PatternLabel label = classify(node->window().snapshot(), c, config_.recognizer);
    node->set_pattern(label);
    note_label(node->path_str(), label, now_ms, /*transition=*/false);
    apply_pattern(unit, *node, label, now_ms);
  }
}

ResidencyProbe Simulator::Impl::residency_probe(CacheManageUnit& unit) const {
  return [this, &unit](const ItemPath& block) {
    return unit.resident(block) || queued_or_inflight_.count(block.str()) > 0;
  };
}

void Simulator::Impl::enqueue_prefetch(CacheManageUnit& unit, const ItemPath& block,
                                       double now_ms) {
  const std::string id = block.str();
  if (queued_or_inflight_.count(id) > 0 || unit.resident(block)) {
    return;
  }
  PrefetchItem item;
  item.block = block;
  item.unit_id = unit.id();
  item.size = catalog_.block_bytes(block.file_str(), block.block_index.value_or(0));
  item.enqueue_ms = now_ms;
  prefetch_queues_[unit.id()].push_back(std::move(item));
  queued_or_inflight_.insert(id);
}

void Simulator::Impl::plan_statistical(CacheManageUnit& unit, AccessStreamNode& node,
                                       double now_ms) {
  if (config_.prefetch_mode != PrefetchModeFlag::adaptive) {
    return;
  }
  const std::uint64_t dataset_bytes = catalog_.is_dir(node.path_str()) || catalog_.is_file(node.path_str())
                                          ? catalog_.subtree_bytes(node.path_str())
                                          : 0;
  const PrefetchPlan plan = plan_prefetch_random(node, unit.quota_bytes(), dataset_bytes, catalog_,
                                                 config_.policy, residency_probe(unit));
  for (const auto& target : plan.targets) {
    enqueue_prefetch(unit, target, now_ms);
  }
}

void Simulator::Impl::plan_after_access(CacheManageUnit* unit, const ItemPath& block,
                                        double now_ms) {
  if (config_.prefetch_mode == PrefetchModeFlag::none) {
    return;
  }
  if (config_.prefetch_mode == PrefetchModeFlag::stride || !adaptive_policy()) {
    if (config_.prefetch_mode != PrefetchModeFlag::adaptive && unit != nullptr) {
      // Block-level stride: once 4 consecutive blocks of one file have been
      // read, keep the next 4 blocks in flight; never crosses a file
      // boundary.
      const std::string file = block.file_str();
      auto& [last, run] = stride_runs_[file];
      const auto index = static_cast<std::int64_t>(*block.block_index);
      run = (run != 0 && index == last + 1) ? run + 1 : 1;
      last = index;
      if (run >= 4) {
        const std::uint64_t blocks = catalog_.block_count(file);
        const ItemPath file_path = block.without_block();
        for (std::uint64_t b = static_cast<std::uint64_t>(index) + 1;
             b <= static_cast<std::uint64_t>(index) + 4 && b < blocks; ++b) {
          enqueue_prefetch(*unit, file_path.with_block(b), now_ms);
        }
      }
    }
    return;
  }
  // Adaptive: pattern-specific planning for the owning stream.
  if (unit == nullptr || unit->expired() || !unit->pattern()) {
    return;
  }
  if (*unit->pattern() != PatternLabel::sequential) {
    return;  // statistical prefetch is (re)planned on transitions and refreshes
  }
  AccessStreamNode* node = tree_.find(unit->id());
  if (node == nullptr) {
    return;
  }
  const PrefetchPlan plan =
      plan_prefetch_sequential(*node, catalog_, config_.policy, residency_probe(*unit));
  for (const auto& target : plan.targets) {
    enqueue_prefetch(*unit, target, now_ms);
  }
}

void Simulator::Impl::advance_prefetch(double to_ms) {
  while (true) {
    // Drop cancelled heads and drained queues.
    for (auto it = prefetch_queues_.begin(); it != prefetch_queues_.end();) {
      auto& items = it->second;
      while (!items.empty() && cancelled_.count(items.front().block.str()) > 0) {
        cancelled_.erase(items.front().block.str());
        items.pop_front();
      }
      it = items.empty() ? prefetch_queues_.erase(it) : std::next(it);
    }
    if (prefetch_queues_.empty()) {
      return;
    }
    // Next partition after the cursor (wrapping) whose head can start in time.
    auto it = prefetch_queues_.upper_bound(rr_cursor_);
    bool scheduled = false;
    for (std::size_t step = 0; step < prefetch_queues_.size() && !scheduled; ++step) {
      if (it == prefetch_queues_.end()) {
        it = prefetch_queues_.begin();
      }
      PrefetchItem& head = it->second.front();
      const double start =
          std::max({channel_busy_until_, head.enqueue_ms, next_prefetch_allowed_});
      if (start >= to_ms) {
        ++it;
        continue;
      }
      rr_cursor_ = it->first;
      const std::string id = head.block.str();
      channel_busy_until_ = start + transfer_ms(head.size);
      if (config_.prefetch_rate_bps > 0.0) {
        next_prefetch_allowed_ =
            start + static_cast<double>(head.size) * 8.0 / config_.prefetch_rate_bps * 1000.0;
      }
      const double arrival = channel_busy_until_ + config_.latency.remote_delay_ms;
      inflight_arrival_[id] = arrival;
      arrivals_.push(Arrival{arrival, arrival_seq_++, std::move(head)});
      it->second.pop_front();
      scheduled = true;
    }
    if (!scheduled) {
      return;
    }
  }
}

void Simulator::Impl::process_arrivals(double to_ms) {
  while (!arrivals_.empty() && arrivals_.top().at_ms <= to_ms) {
    const Arrival arrival = arrivals_.top();
    arrivals_.pop();
    const std::string id = arrival.item.block.str();
    inflight_arrival_.erase(id);
    queued_or_inflight_.erase(id);
    const auto it = units_.find(arrival.item.unit_id);
    if (it == units_.end()) {
      continue;
    }
    CacheManageUnit& unit = *it->second;
    total_prefetch_fetched_ += arrival.item.size;
    unit.note_prefetch_fetched(arrival.item.size);
    if (!unit.expired()) {
      unit.admit_prefetched(arrival.item.block, arrival.item.size, arrival.at_ms);
    }
  }
}

double Simulator::Impl::serve_demand_fetch(const ItemPath& block, std::uint64_t size,
                                           double now_ms) {
  const std::string id = block.str();
  // Join an in-flight prefetch instead of fetching twice.
  const auto inflight = inflight_arrival_.find(id);
  if (inflight != inflight_arrival_.end()) {
    return inflight->second + config_.latency.hit_latency_ms;
  }
  if (queued_or_inflight_.count(id) > 0) {
    // Still queued: promote to a demand fetch.
    queued_or_inflight_.erase(id);
    cancelled_.insert(id);
  }
  const double start = std::max(now_ms, channel_busy_until_);
  channel_busy_until_ = start + transfer_ms(size);
  return channel_busy_until_ + config_.latency.remote_delay_ms + config_.latency.hit_latency_ms;
}

std::vector<QuotaTransfer> Simulator::Impl::check_expiries(double t_ms) {
  std::vector<QuotaTransfer> markers;
  if (config_.ttl_mode == TtlMode::none || !adaptive_policy()) {
    return markers;
  }
  for (auto& [id, unit] : units_) {
    if (unit->expired() || !unit->ttl()) {
      continue;
    }
    if (check_stream_expiry(unit->last_request_ms(), t_ms, *unit->ttl())) {
      unit->expire_stream();
      const std::uint64_t released = unit->quota_bytes();
      free_pool_ += released;
      unit->set_quota(0);
      markers.push_back({id, "", released});
    }
  }
  return markers;
}

void Simulator::Impl::sample_chr(double t_ms) {
  ChrPoint point;
  point.t_ms = t_ms;
  const std::uint64_t total = total_hits_ + total_misses_;
  if (total > 0) {
    point.overall = static_cast<double>(total_hits_) / static_cast<double>(total);
  }
  for (const auto& [id, job] : jobs_) {
    point.per_job[id] = job_chr(job);
  }
  chr_timeline_.push_back(std::move(point));
}

void Simulator::Impl::run_tick(double t_ms, std::vector<QuotaTransfer> pending_markers) {
  advance_prefetch(t_ms);
  process_arrivals(t_ms);

  AllocationPoint point;
  point.t_ms = t_ms;
  point.transfers = std::move(pending_markers);

  if (adaptive_policy() && config_.alloc_mode == AllocMode::adaptive) {
    std::vector<UnitAllocationState> states;
    std::map<std::string, BenefitEstimate> estimates;
    for (const auto& [id, unit] : units_) {
      if (unit->expired()) {
        continue;
      }
      BenefitEstimate estimate;
      const PatternLabel label = unit->pattern().value_or(PatternLabel::skewed);
      switch (label) {
        case PatternLabel::sequential:
          estimate = benefit_sequential(id);
          break;
        case PatternLabel::random: {
          std::optional<double> gap_s;
          if (const AccessStreamNode* node = tree_.find(id)) {
            if (const auto gap_ms = node->mean_window_gap_ms()) {
              gap_s = *gap_ms / 1000.0;
            }
          }
          std::uint64_t blocks = 0;
          if (catalog_.is_dir(id) || catalog_.is_file(id)) {
            blocks = catalog_.subtree_block_count(id);
          }
          estimate = benefit_random(id, gap_s, blocks);
          break;
        }
        case PatternLabel::skewed: {
          const auto rates =
              unit->sample_rates(t_ms, static_cast<double>(config_.allocator.period_ms));
          const bool warmed =
              t_ms - unit->created_ms() >= static_cast<double>(config_.allocator.period_ms);
          estimate = benefit_skewed(id, rates.arrival_rate_per_s, rates.ghost_hit_freq,
                                    config_.buffer_window_blocks, warmed);
          break;
        }
      }
      estimates[id] = estimate;
      states.push_back({id, unit->quota_bytes(), estimate.benefit_per_s});
    }

    const AllocationRound round = rebalance(states, free_pool_, t_ms, config_.allocator);
    std::set<std::string> touched;
    for (const auto& transfer : round.transfers) {
      CacheManageUnit& to = *units_.at(transfer.to_unit);
      if (transfer.from_unit.empty()) {
        free_pool_ -= transfer.bytes;
        to.set_quota(to.quota_bytes() + transfer.bytes);
      } else {
        CacheManageUnit& from = *units_.at(transfer.from_unit);
        from.resize_quota(from.quota_bytes() - transfer.bytes);
        to.set_quota(to.quota_bytes() + transfer.bytes);
        touched.insert(transfer.from_unit);
      }
      touched.insert(transfer.to_unit);
      point.transfers.push_back(transfer);
    }
    for (const auto& id : touched) {
      refresh_unit(*units_.at(id), t_ms);
    }
    for (const auto& [id, unit] : units_) {
      AllocationUnitPoint up;
      up.quota_bytes = unit->quota_bytes();
      const auto estimate = estimates.find(id);
      if (estimate != estimates.end()) {
        up.benefit_per_s = estimate->second.benefit_per_s;
        up.warming = estimate->second.warming;
      }
      point.units[id] = up;
    }
  } else {
    for (const auto& [id, unit] : units_) {
      AllocationUnitPoint up;
      up.quota_bytes = unit->quota_bytes();
      point.units[id] = up;
    }
  }
  point.free_pool_bytes = free_pool_;
  allocation_timeline_.push_back(std::move(point));
  sample_chr(t_ms);

  for (auto& [_, unit] : units_) {
    unit->prune_samples(t_ms, 2.0 * static_cast<double>(config_.allocator.period_ms));
  }
  tree_.compress_layers();
}

SimReport Simulator::Impl::run(std::span<const AccessEvent> events) {
  validate(events);

  for (const auto& event : events) {
    auto [it, fresh] = jobs_.try_emplace(event.job_id);
    if (fresh) {
      it->second.id = event.job_id;
      it->second.first_ms = static_cast<double>(event.ts_ms);
      it->second.next_issue_ms = static_cast<double>(event.ts_ms);
    }
    it->second.events.push_back(&event);
  }
  if (!adaptive_policy()) {
    shared_unit();
  } else {
    free_pool_ = config_.cache_capacity_bytes;
  }

  double next_tick = static_cast<double>(config_.allocator.period_ms);

  while (true) {
    JobState* job = nullptr;
    for (auto& [_, candidate] : jobs_) {
      if (candidate.next >= candidate.events.size()) {
        continue;
      }
      if (job == nullptr || candidate.next_issue_ms < job->next_issue_ms) {
        job = &candidate;
      }
    }
    if (job == nullptr) {
      break;
    }
    while (next_tick <= job->next_issue_ms) {
      auto markers = check_expiries(next_tick);
      run_tick(next_tick, std::move(markers));
      next_tick += static_cast<double>(config_.allocator.period_ms);
    }

    const double t = job->next_issue_ms;
    advance_prefetch(t);
    process_arrivals(t);

    const AccessEvent& event = *job->events[job->next];
    const ItemPath block = block_of(event);
    const std::uint64_t size = catalog_.block_bytes(block.file_str(), *block.block_index);

    const auto records = tree_.record_access(event);
    for (const auto& record : records) {
      if (record.became_non_trivial) {
        handle_transition(*record.node, t);
      }
    }

    CacheManageUnit* unit = find_owner(block, t);
    AccessOutcome outcome = AccessOutcome::miss;
    if (unit != nullptr) {
      outcome = unit->access(block, size, t);
    }

    double serve_done = 0.0;
    if (outcome == AccessOutcome::hit) {
      ++job->hits;
      ++total_hits_;
      serve_done = t + config_.latency.hit_latency_ms;
    } else {
      ++job->misses;
      ++total_misses_;
      serve_done = serve_demand_fetch(block, size, t);
    }

    plan_after_access(unit, block, serve_done);

    ++job->next;
    if (job->next >= job->events.size()) {
      job->done_ms = serve_done;
    } else {
      const double think =
          static_cast<double>(job->events[job->next]->ts_ms - event.ts_ms);
      job->next_issue_ms = serve_done + think;
    }
  }

  SimReport report;
  report.total_events = static_cast<std::uint64_t>(events.size());
  report.hits = total_hits_;
  report.misses = total_misses_;
  report.prefetch_fetched_bytes = total_prefetch_fetched_;
  if (report.total_events > 0) {
    report.overall_chr =
        static_cast<double>(total_hits_) / static_cast<double>(total_hits_ + total_misses_);
  }
  double jct_sum = 0.0;
  for (const auto& [id, job] : jobs_) {
    JobReport jr;
    jr.events = static_cast<std::uint64_t>(job.events.size());
    jr.hits = job.hits;
    jr.misses = job.misses;
    jr.chr = job_chr(job);
    jr.first_ms = job.first_ms;
    jr.done_ms = job.done_ms;
    jr.jct_ms = job.done_ms - job.first_ms;
    jct_sum += jr.jct_ms;
    report.per_job[id] = jr;
  }
  if (!jobs_.empty()) {
    report.avg_jct_ms = jct_sum / static_cast<double>(jobs_.size());
  }
  report.per_stream = stream_reports_;
  std::uint64_t ghost_total = 0;
  std::uint64_t used_total = 0;
  for (const auto& [id, unit] : units_) {
    UnitReport ur;
    ur.hits = unit->stats().hits;
    ur.misses = unit->stats().misses;
    ur.ghost_hits = unit->stats().ghost_hits;
    ur.quota_bytes = unit->quota_bytes();
    ur.used_bytes = unit->used_bytes();
    ur.policy = to_string(unit->policy());
    ur.pattern = unit->pattern() ? to_string(*unit->pattern()) : "";
    ur.prefetch_fetched_bytes = unit->stats().prefetch_fetched_bytes;
    ur.prefetch_used_bytes = unit->stats().prefetch_used_bytes;
    ur.expired = unit->expired();
    ghost_total += ur.ghost_hits;
    used_total += ur.prefetch_used_bytes;
    report.per_unit[id] = ur;
  }
  report.ghost_hits = ghost_total;
  report.prefetch_used_bytes = used_total;
  report.allocation_timeline = allocation_timeline_;
  report.chr_timeline = chr_timeline_;
  return report;
}

Simulator::Simulator(const NamespaceCatalog& catalog, SimConfig config)
    : catalog_(catalog), config_(std::move(config)) {}

Simulator::~Simulator() = default;

SimReport Simulator::run(std::span<const AccessEvent> events) {
  Impl impl(catalog_, config_);
  return impl.run(events);
}

}  // namespace adacache
