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
#include <list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "adacache/catalog.hpp"
#include "adacache/pattern.hpp"
#include "adacache/trace.hpp"

namespace adacache {

struct TreeConfig {
  std::size_t window_size = 100;
  std::size_t max_nodes = 10000;
  bool compression_enabled = true;
  // Per-node bound on tracked relative-child identifiers; counts age
  // (halve-and-prune) when the bound is exceeded.
  std::size_t freq_table_cap = 1024;
};

/// Fixed-capacity ring of window entries in arrival order.
class RingWindow {
 public:
  explicit RingWindow(std::size_t capacity) : buf_(capacity) {}

  void push(WindowEntry entry) {
    buf_[(head_ + size_) % buf_.size()] = entry;
    if (size_ < buf_.size()) {
      ++size_;
    } else {
      head_ = (head_ + 1) % buf_.size();
    }
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buf_.size(); }
  bool empty() const { return size_ == 0; }

  const WindowEntry& operator[](std::size_t i) const { return buf_[(head_ + i) % buf_.size()]; }
  const WindowEntry& back() const { return (*this)[size_ - 1]; }

  std::vector<WindowEntry> snapshot() const {
    std::vector<WindowEntry> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      out.push_back((*this)[i]);
    }
    return out;
  }

 private:
  std::vector<WindowEntry> buf_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

/// Access counts of relative descendant identifiers observed below a node's
/// children. Identifiers are paths relative to the child ("file.csv",
/// "file.csv/0"), so the same identifier accumulates across sibling children.
class ChildFrequencyTable {
 public:
  explicit ChildFrequencyTable(std::size_t cap = 0) : cap_(cap) {}

  void record(const std::string& rel_id) {
    ++counts_[rel_id];
    if (cap_ != 0 && counts_.size() > cap_) {
      age();
    }
  }

  void note_observation() { ++observations_; }

  std::uint64_t count(const std::string& rel_id) const {
    const auto it = counts_.find(rel_id);
    return it == counts_.end() ? 0 : it->second;
  }

  /// f = x/n; zero when nothing has been observed.
  double frequency(const std::string& rel_id) const {
    return observations_ == 0
               ? 0.0
               : static_cast<double>(count(rel_id)) / static_cast<double>(observations_);
  }

  /// True when any identifier lies strictly below rel_prefix ("" = any).
  bool has_evidence_below(const std::string& rel_prefix) const;

  std::uint64_t observations() const { return observations_; }
  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }

  void seed(std::string rel_id, std::uint64_t count) { counts_[std::move(rel_id)] = count; }
  void set_observations(std::uint64_t n) { observations_ = n; }

 private:
  void age() {
    for (auto it = counts_.begin(); it != counts_.end();) {
      it->second /= 2;
      it = it->second == 0 ? counts_.erase(it) : std::next(it);
    }
  }

  std::size_t cap_;
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t observations_ = 0;
};

enum class NodeState { trivial, non_trivial };

class AccessStreamTree;

/// One prefix-grouped access stream. A node may span several path segments
/// when layer compression merged a non-bifurcating chain; its window then
/// observes the children of the deepest spanned segment.
class AccessStreamNode {
 public:
  const std::vector<std::string>& segments() const { return segments_; }
  const std::string& path_str() const { return path_; }
  AccessStreamNode* parent() const { return parent_; }

  NodeState state() const { return state_; }
  const std::optional<PatternLabel>& pattern() const { return pattern_; }
  void set_pattern(PatternLabel label) { pattern_ = label; }

  std::int64_t last_access_ms() const { return last_access_ms_; }
  const std::string& unit_id() const { return unit_id_; }

  const RingWindow& window() const { return window_; }
  const ChildFrequencyTable& child_freq() const { return child_freq_; }

  std::size_t distinct_children_seen() const { return distinct_seen_; }
  std::uint64_t route_count() const { return route_count_; }

  const std::map<std::string, std::unique_ptr<AccessStreamNode>>& children() const {
    return children_;
  }

  /// Mean temporal gap between consecutive window entries, in milliseconds.
  std::optional<double> mean_window_gap_ms() const;

  /// Temporal gaps between consecutive window entries, in milliseconds.
  std::vector<double> window_temporal_gaps_ms() const;

 private:
  friend class AccessStreamTree;

  explicit AccessStreamNode(std::size_t window_capacity, std::size_t freq_cap)
      : window_(window_capacity), child_freq_(freq_cap) {}

  std::vector<std::string> segments_;
  std::string path_;
  AccessStreamNode* parent_ = nullptr;
  std::map<std::string, std::unique_ptr<AccessStreamNode>> children_;
  RingWindow window_;
  ChildFrequencyTable child_freq_;
  NodeState state_ = NodeState::trivial;
  std::optional<PatternLabel> pattern_;
  std::int64_t last_access_ms_ = 0;
  std::string unit_id_;
  // Alive only while trivial; freed on the non-trivial transition, so its
  // size is bounded by window_size + 1.
  std::unique_ptr<std::unordered_set<std::string>> distinct_tracker_;
  std::size_t distinct_seen_ = 0;
  std::uint64_t route_count_ = 0;
  // Insertion-order indices for paths that do not resolve in the catalog.
  std::unique_ptr<std::unordered_map<std::string, std::int64_t>> fallback_index_;
  // Counts over this subtree, self included; guard pruning and cap eviction.
  std::int64_t subtree_units_ = 0;
  std::int64_t subtree_non_trivial_ = 0;
  std::list<AccessStreamNode*>::iterator lru_pos_;
};

struct AccessRecord {
  AccessStreamNode* node;
  bool became_non_trivial;
};

/// Tree of access streams mirroring the storage hierarchy. One tree tracks
/// the accesses of all workloads; every access is recorded at each level
/// along its path. Single-writer: record/compress/prune calls must be
/// serialized, while window snapshots may be analyzed concurrently.
class AccessStreamTree {
 public:
  explicit AccessStreamTree(TreeConfig config, const NamespaceCatalog* catalog = nullptr);

  /// Routes one access, creating nodes as needed. Returns the touched nodes
  /// root-to-leaf; nodes whose distinct-child count first exceeded the
  /// window size are flagged. Keeps the node count within the cap.
  std::vector<AccessRecord> record_access(const AccessEvent& event);

  /// Merges maximal chains of single-child trivial nodes. Routing, leaf
  /// reachability, and windows at surviving nodes are unchanged.
  void compress_layers();

  /// Detaches child subtrees of a non-trivial node whose entries have fallen
  /// out of the window; the node's own statistics are retained. No-op for
  /// trivial nodes.
  void prune_children(AccessStreamNode& node);

  /// Evicts least-recently-accessed removable leaves (deepest first among
  /// ties) until the count is within max_nodes. The root and unit-bearing
  /// nodes are never removed.
  void enforce_node_cap();
  void enforce_node_cap_protecting(std::span<const AccessRecord> keep);

  /// Exact-path lookup ("/a/b"); nullptr when absent.
  AccessStreamNode* find(const std::string& path);
  const AccessStreamNode* find(const std::string& path) const;

  AccessStreamNode& root() { return *root_; }
  const AccessStreamNode& root() const { return *root_; }

  void set_unit_id(AccessStreamNode& node, std::string unit_id);

  /// Dataset item count at a node: catalog child count of its prefix when
  /// available, otherwise max observed window index + 1.
  std::uint64_t dataset_item_count(const AccessStreamNode& node) const;

  std::size_t node_count() const { return node_count_; }
  std::size_t max_node_count_seen() const { return max_seen_; }
  const TreeConfig& config() const { return config_; }

  nlohmann::ordered_json dump() const;
  std::size_t approx_memory_bytes() const;

 private:
  AccessStreamNode* create_node(AccessStreamNode* parent, std::vector<std::string> segments,
                                std::int64_t now_ms);
  AccessStreamNode* split(AccessStreamNode* node, std::size_t keep);
  void merge_into(AccessStreamNode& node);
  void destroy_subtree(AccessStreamNode* node);
  void touch(AccessStreamNode* node, std::int64_t now_ms);
  std::int64_t child_index_of(AccessStreamNode* parent, const std::string& name, bool is_block,
                              std::uint64_t block_value);
  static std::string joined_path(const AccessStreamNode* parent,
                                 const std::vector<std::string>& segments);
  bool removable_leaf(const AccessStreamNode* node) const;

  TreeConfig config_;
  const NamespaceCatalog* catalog_;
  std::unique_ptr<AccessStreamNode> root_;
  std::list<AccessStreamNode*> lru_;  // front = most recently accessed
  std::size_t node_count_ = 1;
  std::size_t max_seen_ = 1;
};

}  // namespace adacache
