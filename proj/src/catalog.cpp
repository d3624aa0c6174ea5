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

#include "adacache/catalog.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "adacache/errors.hpp"

namespace adacache {

NamespaceCatalog::NamespaceCatalog(std::uint64_t block_size_bytes) : block_size_(block_size_bytes) {
  if (block_size_ == 0) {
    throw ConfigError("block size must be positive");
  }
  entries_["/"] = {};
}

void NamespaceCatalog::ensure_dir(const std::string& dir_path) {
  if (entries_.count(dir_path) > 0) {
    return;
  }
  const ItemPath path = ItemPath::parse(dir_path);
  entries_[dir_path] = {};
  ensure_dir(path.parent_str());
  insert_child_sorted(path.parent_str(), path.name());
}

void NamespaceCatalog::insert_child_sorted(const std::string& dir_path, const std::string& name) {
  auto& kids = entries_[dir_path];
  const auto pos = std::lower_bound(kids.begin(), kids.end(), name);
  if (pos != kids.end() && *pos == name) {
    return;
  }
  kids.insert(pos, name);
  index_cache_.erase(dir_path);
}

void NamespaceCatalog::add_file(const std::string& file_path, std::uint64_t size_bytes) {
  const ItemPath path = ItemPath::parse(file_path);
  ensure_dir(path.parent_str());
  insert_child_sorted(path.parent_str(), path.name());
  file_sizes_[path.file_str()] = size_bytes;
}

void NamespaceCatalog::set_children(const std::string& dir_path, std::vector<std::string> children) {
  ensure_dir(dir_path);
  entries_[dir_path] = std::move(children);
  index_cache_.erase(dir_path);
}

const std::vector<std::string>& NamespaceCatalog::children(const std::string& dir_path) const {
  const auto it = entries_.find(dir_path);
  if (it == entries_.end()) {
    throw LookupError("not a directory in catalog: " + dir_path);
  }
  return it->second;
}

std::uint64_t NamespaceCatalog::file_size(const std::string& file_path) const {
  const auto it = file_sizes_.find(file_path);
  if (it == file_sizes_.end()) {
    throw LookupError("not a file in catalog: " + file_path);
  }
  return it->second;
}

std::uint64_t NamespaceCatalog::block_count(const std::string& file_path) const {
  const std::uint64_t size = file_size(file_path);
  return size == 0 ? 1 : (size + block_size_ - 1) / block_size_;
}

std::uint64_t NamespaceCatalog::block_bytes(const std::string& file_path, std::uint64_t block) const {
  const std::uint64_t size = file_size(file_path);
  const std::uint64_t count = block_count(file_path);
  if (block >= count) {
    throw LookupError("block " + std::to_string(block) + " out of range for " + file_path);
  }
  if (block + 1 == count) {
    const std::uint64_t rem = size - block * block_size_;
    return rem == 0 ? size : rem;
  }
  return block_size_;
}

std::size_t NamespaceCatalog::child_index(const std::string& dir_path, const std::string& name) const {
  auto cached = index_cache_.find(dir_path);
  if (cached == index_cache_.end()) {
    const auto& kids = children(dir_path);
    std::unordered_map<std::string, std::size_t> table;
    table.reserve(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) {
      table.emplace(kids[i], i);
    }
    cached = index_cache_.emplace(dir_path, std::move(table)).first;
  }
  const auto it = cached->second.find(name);
  if (it == cached->second.end()) {
    throw LookupError("'" + name + "' is not a child of " + dir_path);
  }
  return it->second;
}

std::uint64_t NamespaceCatalog::sequential_index(const ItemPath& path) const {
  if (path.block_index) {
    return *path.block_index;
  }
  return child_index(path.parent_str(), path.name());
}

bool NamespaceCatalog::resolves(const ItemPath& path) const {
  const std::string file = path.file_str();
  if (is_file(file)) {
    return !path.block_index || *path.block_index < block_count(file);
  }
  return !path.block_index && is_dir(file);
}

std::uint64_t NamespaceCatalog::subtree_bytes(const std::string& path) const {
  if (is_file(path)) {
    return file_size(path);
  }
  std::uint64_t total = 0;
  for (const auto& kid : children(path)) {
    total += subtree_bytes(path == "/" ? "/" + kid : path + "/" + kid);
  }
  return total;
}

std::uint64_t NamespaceCatalog::subtree_block_count(const std::string& path) const {
  if (is_file(path)) {
    return block_count(path);
  }
  std::uint64_t total = 0;
  for (const auto& kid : children(path)) {
    total += subtree_block_count(path == "/" ? "/" + kid : path + "/" + kid);
  }
  return total;
}

void NamespaceCatalog::for_each_block(
    const std::string& path,
    const std::function<bool(const ItemPath&, std::uint64_t size)>& visit) const {
  struct Walker {
    const NamespaceCatalog& cat;
    const std::function<bool(const ItemPath&, std::uint64_t)>& visit;

    bool walk(const std::string& p) const {
      if (cat.is_file(p)) {
        const ItemPath file = ItemPath::parse(p);
        const std::uint64_t count = cat.block_count(p);
        for (std::uint64_t b = 0; b < count; ++b) {
          if (!visit(file.with_block(b), cat.block_bytes(p, b))) {
            return false;
          }
        }
        return true;
      }
      for (const auto& kid : cat.children(p)) {
        if (!walk(p == "/" ? "/" + kid : p + "/" + kid)) {
          return false;
        }
      }
      return true;
    }
  };
  Walker{*this, visit}.walk(path);
}

NamespaceCatalog NamespaceCatalog::from_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }
  NamespaceCatalog cat(doc.value("block_size", kDefaultBlockSizeBytes));
  if (doc.contains("entries")) {
    for (const auto& [dir, kids] : doc.at("entries").items()) {
      std::vector<std::string> names;
      names.reserve(kids.size());
      for (const auto& kid : kids) {
        names.push_back(kid.get<std::string>());
      }
      cat.ensure_dir(dir);
      cat.entries_[dir] = std::move(names);
    }
  }
  if (doc.contains("file_sizes")) {
    for (const auto& [file, size] : doc.at("file_sizes").items()) {
      const ItemPath path = ItemPath::parse(file);
      const std::string parent = path.parent_str();
      if (cat.entries_.count(parent) == 0) {
        cat.ensure_dir(parent);
      }
      // Respect an explicit manifest if the parent listed this file already.
      const auto& kids = cat.entries_[parent];
      if (std::find(kids.begin(), kids.end(), path.name()) == kids.end()) {
        cat.insert_child_sorted(parent, path.name());
      }
      cat.file_sizes_[path.file_str()] = size.get<std::uint64_t>();
    }
  }
  cat.index_cache_.clear();
  return cat;
}

void NamespaceCatalog::to_json(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["block_size"] = block_size_;
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  for (const auto& [dir, kids] : entries_) {
    entries[dir] = kids;
  }
  doc["entries"] = std::move(entries);
  nlohmann::ordered_json sizes = nlohmann::ordered_json::object();
  for (const auto& [file, size] : file_sizes_) {
    sizes[file] = size;
  }
  doc["file_sizes"] = std::move(sizes);
  out << doc.dump(2) << '\n';
}

}  // namespace adacache
