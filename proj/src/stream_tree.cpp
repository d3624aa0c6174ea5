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

#include "adacache/stream_tree.hpp"

#include <algorithm>
#include <charconv>

#include "adacache/errors.hpp"

namespace adacache {

bool ChildFrequencyTable::has_evidence_below(const std::string& rel_prefix) const {
  if (rel_prefix.empty()) {
    return !counts_.empty();
  }
  const std::string lower = rel_prefix + "/";
  const auto it = counts_.lower_bound(lower);
  return it != counts_.end() && it->first.compare(0, lower.size(), lower) == 0;
}

std::optional<double> AccessStreamNode::mean_window_gap_ms() const {
  if (window_.size() < 2) {
    return std::nullopt;
  }
  const double span = static_cast<double>(window_.back().ts_ms - window_[0].ts_ms);
  return span / static_cast<double>(window_.size() - 1);
}

std::vector<double> AccessStreamNode::window_temporal_gaps_ms() const {
  std::vector<double> gaps;
  if (window_.size() < 2) {
    return gaps;
  }
  gaps.reserve(window_.size() - 1);
  for (std::size_t i = 1; i < window_.size(); ++i) {
    gaps.push_back(static_cast<double>(window_[i].ts_ms - window_[i - 1].ts_ms));
  }
  return gaps;
}

AccessStreamTree::AccessStreamTree(TreeConfig config, const NamespaceCatalog* catalog)
    : config_(config), catalog_(catalog) {
  if (config_.window_size < 2) {
    throw ConfigError("window_size must be at least 2");
  }
  if (config_.max_nodes < config_.window_size) {
    throw ConfigError("max_nodes must be at least window_size");
  }
  root_.reset(new AccessStreamNode(config_.window_size, config_.freq_table_cap));
  root_->path_ = "/";
  lru_.push_front(root_.get());
  root_->lru_pos_ = lru_.begin();
}

std::string AccessStreamTree::joined_path(const AccessStreamNode* parent,
                                          const std::vector<std::string>& segments) {
  std::string path = parent == nullptr || parent->path_ == "/" ? "" : parent->path_;
  for (const auto& seg : segments) {
    path += '/';
    path += seg;
  }
  return path.empty() ? "/" : path;
}

AccessStreamNode* AccessStreamTree::create_node(AccessStreamNode* parent,
                                                std::vector<std::string> segments,
                                                std::int64_t now_ms) {
  auto node = std::unique_ptr<AccessStreamNode>(
      new AccessStreamNode(config_.window_size, config_.freq_table_cap));
  node->segments_ = std::move(segments);
  node->parent_ = parent;
  node->path_ = joined_path(parent, node->segments_);
  node->last_access_ms_ = now_ms;
  AccessStreamNode* raw = node.get();
  parent->children_.emplace(raw->segments_.front(), std::move(node));
  lru_.push_front(raw);
  raw->lru_pos_ = lru_.begin();
  ++node_count_;
  max_seen_ = std::max(max_seen_, node_count_);
  return raw;
}

void AccessStreamTree::touch(AccessStreamNode* node, std::int64_t now_ms) {
  node->last_access_ms_ = now_ms;
  lru_.splice(lru_.begin(), lru_, node->lru_pos_);
}

std::int64_t AccessStreamTree::child_index_of(AccessStreamNode* parent, const std::string& name,
                                              bool is_block, std::uint64_t block_value) {
  if (is_block) {
    return static_cast<std::int64_t>(block_value);
  }
  if (catalog_ != nullptr) {
    try {
      return static_cast<std::int64_t>(catalog_->child_index(parent->path_, name));
    } catch (const LookupError&) {
      // fall through to insertion-order indexing
    }
  }
  if (!parent->fallback_index_) {
    parent->fallback_index_.reset(new std::unordered_map<std::string, std::int64_t>());
  }
  const auto next = static_cast<std::int64_t>(parent->fallback_index_->size());
  return parent->fallback_index_->emplace(name, next).first->second;
}

std::vector<AccessRecord> AccessStreamTree::record_access(const AccessEvent& event) {
  std::vector<std::string> segs = event.path.components;
  std::uint64_t block = 0;
  if (event.path.block_index) {
    block = *event.path.block_index;
  } else {
    const std::uint64_t bs = catalog_ != nullptr ? catalog_->block_size_bytes() : kDefaultBlockSizeBytes;
    block = event.offset_bytes / bs;
  }
  segs.push_back(std::to_string(block));
  const std::size_t block_pos = segs.size() - 1;

  std::vector<AccessRecord> records;
  records.reserve(segs.size() + 1);

  AccessStreamNode* cur = root_.get();
  touch(cur, event.ts_ms);
  ++cur->route_count_;

  std::size_t i = 0;
  while (i < segs.size()) {
    const std::string& name = segs[i];
    const bool is_block = i == block_pos;

    cur->window_.push(
        WindowEntry{child_index_of(cur, name, is_block, block), event.ts_ms});

    bool transitioned = false;
    if (cur->state_ == NodeState::trivial) {
      if (!cur->distinct_tracker_) {
        cur->distinct_tracker_.reset(new std::unordered_set<std::string>());
        cur->distinct_tracker_->reserve(config_.window_size + 1);
      }
      if (cur->distinct_tracker_->insert(name).second) {
        ++cur->distinct_seen_;
      }
      if (cur->distinct_seen_ > config_.window_size) {
        cur->state_ = NodeState::non_trivial;
        cur->distinct_tracker_.reset();
        for (AccessStreamNode* up = cur; up != nullptr; up = up->parent_) {
          ++up->subtree_non_trivial_;
        }
        transitioned = true;
      }
    }

    if (i + 1 < segs.size()) {
      std::string rel;
      for (std::size_t e = i + 1; e < segs.size(); ++e) {
        if (!rel.empty()) {
          rel += '/';
        }
        rel += segs[e];
        cur->child_freq_.record(rel);
      }
      cur->child_freq_.note_observation();
    }

    records.push_back({cur, transitioned});

    AccessStreamNode* child = nullptr;
    const auto it = cur->children_.find(name);
    if (it == cur->children_.end()) {
      child = create_node(cur, {name}, event.ts_ms);
    } else {
      child = it->second.get();
      std::size_t matched = 1;
      while (matched < child->segments_.size() && i + matched < segs.size() &&
             child->segments_[matched] == segs[i + matched]) {
        ++matched;
      }
      if (matched < child->segments_.size()) {
        child = split(child, matched);
      }
    }
    i += child->segments_.size();
    touch(child, event.ts_ms);
    ++child->route_count_;
    cur = child;
  }
  records.push_back({cur, false});

  // Batched trigger (2x window) keeps pruning amortized O(1) per access.
  for (const auto& rec : records) {
    if (rec.node->state_ == NodeState::non_trivial &&
        rec.node->children_.size() > 2 * config_.window_size) {
      prune_children(*rec.node);
    }
  }
  enforce_node_cap_protecting(records);
  return records;
}

AccessStreamNode* AccessStreamTree::split(AccessStreamNode* node, std::size_t keep) {
  AccessStreamNode* parent = node->parent_;
  const std::string key = node->segments_.front();

  auto head_owner = std::unique_ptr<AccessStreamNode>(
      new AccessStreamNode(config_.window_size, config_.freq_table_cap));
  AccessStreamNode* head = head_owner.get();
  head->segments_.assign(node->segments_.begin(),
                         node->segments_.begin() + static_cast<std::ptrdiff_t>(keep));
  head->parent_ = parent;
  head->path_ = joined_path(parent, head->segments_);
  head->last_access_ms_ = node->last_access_ms_;
  head->route_count_ = node->route_count_;
  head->subtree_units_ = node->subtree_units_;
  head->subtree_non_trivial_ = node->subtree_non_trivial_;

  std::vector<std::string> tail_segments(node->segments_.begin() + static_cast<std::ptrdiff_t>(keep),
                                         node->segments_.end());
  const std::string& tail_head_name = tail_segments.front();

  // Every access recorded at the tail traversed the merged chain, so the
  // head's window is the tail's timestamps paired with the tail head's
  // constant child index.
  const std::int64_t tail_index = child_index_of(head, tail_head_name, false, 0);
  for (std::size_t w = 0; w < node->window_.size(); ++w) {
    head->window_.push(WindowEntry{tail_index, node->window_[w].ts_ms});
  }
  head->distinct_tracker_.reset(new std::unordered_set<std::string>());
  head->distinct_tracker_->insert(tail_head_name);
  head->distinct_seen_ = 1;

  // Relative identifiers below the tail head are the interior chain
  // prefixes; each routed access passed through all of them.
  if (tail_segments.size() > 1) {
    std::string rel;
    for (std::size_t e = 1; e < tail_segments.size(); ++e) {
      if (!rel.empty()) {
        rel += '/';
      }
      rel += tail_segments[e];
      head->child_freq_.seed(rel, node->route_count_);
    }
    head->child_freq_.set_observations(node->route_count_);
  }

  auto detached = std::move(parent->children_.at(key));
  parent->children_.erase(key);
  parent->children_.emplace(key, std::move(head_owner));

  node->segments_ = std::move(tail_segments);
  node->parent_ = head;
  node->path_ = joined_path(head, node->segments_);
  head->children_.emplace(node->segments_.front(), std::move(detached));

  // Keep the head adjacent to the tail in recency order (same accesses).
  head->lru_pos_ = lru_.insert(std::next(node->lru_pos_), head);
  ++node_count_;
  max_seen_ = std::max(max_seen_, node_count_);
  return head;
}

void AccessStreamTree::merge_into(AccessStreamNode& node) {
  while (node.state_ == NodeState::trivial && node.unit_id_.empty() &&
         node.children_.size() == 1) {
    AccessStreamNode* child = node.children_.begin()->second.get();
    if (child->state_ != NodeState::trivial || !child->unit_id_.empty() ||
        child->children_.size() != 1) {
      break;
    }
    auto owned = std::move(node.children_.begin()->second);
    node.children_.clear();

    node.segments_.insert(node.segments_.end(), child->segments_.begin(), child->segments_.end());
    node.window_ = std::move(child->window_);
    node.child_freq_ = std::move(child->child_freq_);
    node.distinct_tracker_ = std::move(child->distinct_tracker_);
    node.distinct_seen_ = child->distinct_seen_;
    node.route_count_ = child->route_count_;
    node.last_access_ms_ = child->last_access_ms_;
    node.fallback_index_ = std::move(child->fallback_index_);
    node.children_ = std::move(child->children_);
    for (auto& [_, grand] : node.children_) {
      grand->parent_ = &node;
    }
    lru_.erase(child->lru_pos_);
    --node_count_;
    // `owned` destroys the absorbed child here.
  }
}

void AccessStreamTree::compress_layers() {
  if (!config_.compression_enabled) {
    return;
  }
  std::vector<AccessStreamNode*> stack{root_.get()};
  while (!stack.empty()) {
    AccessStreamNode* node = stack.back();
    stack.pop_back();
    if (node != root_.get()) {
      merge_into(*node);
    }
    for (auto& [_, child] : node->children_) {
      stack.push_back(child.get());
    }
  }
}

void AccessStreamTree::destroy_subtree(AccessStreamNode* node) {
  for (auto& [_, child] : node->children_) {
    destroy_subtree(child.get());
  }
  node->children_.clear();
  lru_.erase(node->lru_pos_);
  --node_count_;
}

void AccessStreamTree::prune_children(AccessStreamNode& node) {
  if (node.state_ != NodeState::non_trivial) {
    return;
  }
  std::unordered_set<std::int64_t> live;
  live.reserve(node.window_.size());
  for (std::size_t i = 0; i < node.window_.size(); ++i) {
    live.insert(node.window_[i].index);
  }
  const bool block_children =
      catalog_ != nullptr && catalog_->is_file(node.path_);

  std::vector<std::string> doomed;
  for (const auto& [name, child] : node.children_) {
    if (child->subtree_units_ != 0 || child->subtree_non_trivial_ != 0) {
      continue;
    }
    std::int64_t index = 0;
    if (block_children) {
      std::uint64_t value = 0;
      const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), value);
      index = (ec == std::errc{} && ptr == name.data() + name.size())
                  ? static_cast<std::int64_t>(value)
                  : -1;
    } else {
      index = child_index_of(&node, name, false, 0);
    }
    if (live.count(index) == 0) {
      doomed.push_back(name);
    }
  }
  for (const auto& name : doomed) {
    auto it = node.children_.find(name);
    destroy_subtree(it->second.get());
    node.children_.erase(it);
  }
}

bool AccessStreamTree::removable_leaf(const AccessStreamNode* node) const {
  return node != root_.get() && node->children_.empty() && node->unit_id_.empty() &&
         node->subtree_units_ == 0;
}

void AccessStreamTree::enforce_node_cap() { enforce_node_cap_protecting({}); }

void AccessStreamTree::enforce_node_cap_protecting(std::span<const AccessRecord> keep) {
  const auto protected_node = [&](const AccessStreamNode* node) {
    for (const auto& rec : keep) {
      if (rec.node == node) {
        return true;
      }
    }
    return false;
  };
  while (node_count_ > config_.max_nodes) {
    AccessStreamNode* victim = nullptr;
    for (auto it = lru_.rbegin(); it != lru_.rend(); ++it) {
      if (removable_leaf(*it) && !protected_node(*it)) {
        victim = *it;
        break;
      }
    }
    if (victim == nullptr) {
      break;
    }
    // Evict, then cascade up through parents this eviction left childless.
    while (victim != nullptr && node_count_ > config_.max_nodes && removable_leaf(victim) &&
           !protected_node(victim)) {
      AccessStreamNode* parent = victim->parent_;
      const bool non_trivial = victim->state_ == NodeState::non_trivial;
      lru_.erase(victim->lru_pos_);
      parent->children_.erase(victim->segments_.front());
      --node_count_;
      if (non_trivial) {
        for (AccessStreamNode* up = parent; up != nullptr; up = up->parent_) {
          --up->subtree_non_trivial_;
        }
      }
      victim = parent;
    }
  }
}

AccessStreamNode* AccessStreamTree::find(const std::string& path) {
  if (path == "/" || path.empty()) {
    return root_.get();
  }
  const ItemPath parsed = ItemPath::parse(path);
  AccessStreamNode* cur = root_.get();
  std::size_t i = 0;
  while (i < parsed.components.size()) {
    const auto it = cur->children_.find(parsed.components[i]);
    if (it == cur->children_.end()) {
      return nullptr;
    }
    AccessStreamNode* child = it->second.get();
    for (const auto& seg : child->segments_) {
      if (i >= parsed.components.size() || parsed.components[i] != seg) {
        return nullptr;
      }
      ++i;
    }
    cur = child;
  }
  return cur;
}

const AccessStreamNode* AccessStreamTree::find(const std::string& path) const {
  return const_cast<AccessStreamTree*>(this)->find(path);
}

void AccessStreamTree::set_unit_id(AccessStreamNode& node, std::string unit_id) {
  const bool had = !node.unit_id_.empty();
  const bool has = !unit_id.empty();
  node.unit_id_ = std::move(unit_id);
  if (had != has) {
    const std::int64_t delta = has ? 1 : -1;
    for (AccessStreamNode* up = &node; up != nullptr; up = up->parent_) {
      up->subtree_units_ += delta;
    }
  }
}

std::uint64_t AccessStreamTree::dataset_item_count(const AccessStreamNode& node) const {
  if (catalog_ != nullptr) {
    if (catalog_->is_dir(node.path_)) {
      return catalog_->children(node.path_).size();
    }
    if (catalog_->is_file(node.path_)) {
      return catalog_->block_count(node.path_);
    }
  }
  std::int64_t max_index = -1;
  for (std::size_t i = 0; i < node.window_.size(); ++i) {
    max_index = std::max(max_index, node.window_[i].index);
  }
  return static_cast<std::uint64_t>(max_index + 1);
}

namespace {

nlohmann::ordered_json dump_node(const AccessStreamNode& node) {
  nlohmann::ordered_json doc;
  doc["prefix"] = node.path_str();
  doc["state"] = node.state() == NodeState::non_trivial ? "non-trivial" : "trivial";
  doc["pattern"] = node.pattern() ? to_string(*node.pattern()) : "";
  doc["window_length"] = node.window().size();
  nlohmann::ordered_json kids = nlohmann::ordered_json::object();
  for (const auto& [name, child] : node.children()) {
    kids[name] = dump_node(*child);
  }
  doc["children"] = std::move(kids);
  return doc;
}

}  // namespace

nlohmann::ordered_json AccessStreamTree::dump() const { return dump_node(*root_); }

std::size_t AccessStreamTree::approx_memory_bytes() const {
  std::size_t total = 0;
  for (const AccessStreamNode* node : lru_) {
    total += sizeof(AccessStreamNode);
    total += node->window().capacity() * sizeof(WindowEntry);
    for (const auto& seg : node->segments_) {
      total += seg.capacity() + sizeof(std::string);
    }
    total += node->children_.size() * (sizeof(void*) * 8);
    for (const auto& [id, _] : node->child_freq_.counts()) {
      total += id.capacity() + 48;
    }
    if (node->distinct_tracker_) {
      total += node->distinct_tracker_->size() * 48;
    }
  }
  return total;
}

}  // namespace adacache
