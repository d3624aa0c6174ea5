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

#include "adacache/item_path.hpp"

#include <charconv>

#include "adacache/errors.hpp"

namespace adacache {

ItemPath::ItemPath(std::vector<std::string> comps, std::optional<std::uint64_t> block)
    : components(std::move(comps)), block_index(block) {
  if (components.empty()) {
    throw ParseError("item path must have at least one component");
  }
}

ItemPath ItemPath::parse(std::string_view text) {
  std::optional<std::uint64_t> block;
  if (const auto hash = text.rfind('#'); hash != std::string_view::npos) {
    const std::string_view digits = text.substr(hash + 1);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
      throw ParseError("malformed block suffix in path '" + std::string(text) + "'");
    }
    block = value;
    text = text.substr(0, hash);
  }
  if (!text.empty() && text.front() == '/') {
    text.remove_prefix(1);
  }
  std::vector<std::string> comps;
  while (!text.empty()) {
    const auto slash = text.find('/');
    const std::string_view seg = text.substr(0, slash);
    if (seg.empty()) {
      throw ParseError("empty path segment in '" + std::string(text) + "'");
    }
    comps.emplace_back(seg);
    if (slash == std::string_view::npos) {
      break;
    }
    text.remove_prefix(slash + 1);
  }
  if (comps.empty()) {
    throw ParseError("empty item path");
  }
  return ItemPath(std::move(comps), block);
}

std::string ItemPath::str() const {
  std::string out = file_str();
  if (block_index) {
    out += '#';
    out += std::to_string(*block_index);
  }
  return out;
}

std::string ItemPath::file_str() const { return join_components(components); }

ItemPath ItemPath::without_block() const { return ItemPath(components); }

std::string ItemPath::parent_str() const {
  std::vector<std::string> parent(components.begin(), components.end() - 1);
  return join_components(parent);
}

ItemPath ItemPath::child(std::string name) const {
  ItemPath out(components);
  out.components.push_back(std::move(name));
  return out;
}

ItemPath ItemPath::with_block(std::uint64_t block) const {
  ItemPath out(components);
  out.block_index = block;
  return out;
}

std::string join_components(const std::vector<std::string>& components) {
  if (components.empty()) {
    return "/";
  }
  std::string out;
  for (const auto& seg : components) {
    out += '/';
    out += seg;
  }
  return out;
}

}  // namespace adacache
