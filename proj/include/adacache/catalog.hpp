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
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adacache/item_path.hpp"

namespace adacache {

inline constexpr std::uint64_t kDefaultBlockSizeBytes = 4ULL * 1024 * 1024;

/// Static description of the storage namespace: directory listings in their
/// deterministic traversal order, file sizes, and the block size. The index
/// of a child in its parent listing is the item's sequential element number.
///
/// Child order defaults to lexicographic insertion; an order given explicitly
/// (via set_children or a catalog file) is kept as-is.
class NamespaceCatalog {
 public:
  explicit NamespaceCatalog(std::uint64_t block_size_bytes = kDefaultBlockSizeBytes);

  /// Registers a file, creating parent directories as needed. Children added
  /// this way keep lexicographic order.
  void add_file(const std::string& file_path, std::uint64_t size_bytes);

  /// Replaces a directory's child list with an explicit manifest order.
  void set_children(const std::string& dir_path, std::vector<std::string> children);

  std::uint64_t block_size_bytes() const { return block_size_; }

  bool is_dir(const std::string& path) const { return entries_.count(path) > 0; }
  bool is_file(const std::string& path) const { return file_sizes_.count(path) > 0; }

  /// Ordered child names of a directory; throws LookupError for non-dirs.
  const std::vector<std::string>& children(const std::string& dir_path) const;

  std::uint64_t file_size(const std::string& file_path) const;
  std::uint64_t block_count(const std::string& file_path) const;

  /// Size of one block of a file (the last block may be short).
  std::uint64_t block_bytes(const std::string& file_path, std::uint64_t block) const;

  /// Position of `name` in its parent listing; throws LookupError if absent.
  std::size_t child_index(const std::string& dir_path, const std::string& name) const;

  /// Sequential element number of a path: the block id for block references,
  /// otherwise the index in the parent's ordered child list.
  std::uint64_t sequential_index(const ItemPath& path) const;

  /// True when every component resolves and any block index is in range.
  bool resolves(const ItemPath& path) const;

  /// Total bytes / blocks of all files under a directory (or of one file).
  std::uint64_t subtree_bytes(const std::string& path) const;
  std::uint64_t subtree_block_count(const std::string& path) const;

  /// Visits every block under `path` in catalog traversal order. Returning
  /// false from the visitor stops the walk.
  void for_each_block(const std::string& path,
                      const std::function<bool(const ItemPath&, std::uint64_t size)>& visit) const;

  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }
  const std::map<std::string, std::uint64_t>& file_sizes() const { return file_sizes_; }

  static NamespaceCatalog from_json(std::istream& in);
  void to_json(std::ostream& out) const;

 private:
  void ensure_dir(const std::string& dir_path);
  void insert_child_sorted(const std::string& dir_path, const std::string& name);

  std::uint64_t block_size_;
  std::map<std::string, std::vector<std::string>> entries_;
  std::map<std::string, std::uint64_t> file_sizes_;
  // Lazy name -> position caches, invalidated on mutation.
  mutable std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> index_cache_;
};

}  // namespace adacache
