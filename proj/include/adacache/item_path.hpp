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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adacache {

/// Hierarchical item reference: directory components, a file name, and an
/// optional block index for block-granular references.
///
/// Canonical text form is "/dir/file" or "/dir/file#3" for block 3.
struct ItemPath {
  std::vector<std::string> components;
  std::optional<std::uint64_t> block_index;

  ItemPath() = default;
  ItemPath(std::vector<std::string> comps, std::optional<std::uint64_t> block = std::nullopt);

  /// Parses the canonical form. Throws ParseError on empty paths, empty
  /// segments, or a malformed block suffix.
  static ItemPath parse(std::string_view text);

  /// Canonical form including the block suffix.
  std::string str() const;

  /// Canonical form without the block suffix.
  std::string file_str() const;

  /// Same components, no block index.
  ItemPath without_block() const;

  /// Path of the enclosing directory ("/" for top-level components).
  std::string parent_str() const;

  /// Last path component.
  const std::string& name() const { return components.back(); }

  ItemPath child(std::string name) const;
  ItemPath with_block(std::uint64_t block) const;

  bool operator==(const ItemPath& other) const = default;
};

/// Joins components into "/a/b/c". An empty list renders as "/".
std::string join_components(const std::vector<std::string>& components);

}  // namespace adacache
