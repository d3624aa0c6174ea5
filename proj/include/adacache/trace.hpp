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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adacache/item_path.hpp"

namespace adacache {

/// One block-granular read. job_id is opaque workload metadata; the engine
/// never consults it.
struct AccessEvent {
  std::int64_t ts_ms = 0;
  ItemPath path;
  std::uint64_t offset_bytes = 0;
  std::uint64_t length_bytes = 0;
  std::string job_id;

  bool operator==(const AccessEvent& other) const = default;
};

/// Reads a JSON Lines trace (fields ts_ms, path, offset, length, job).
/// Throws ParseError naming the offending line, or OrderingError when
/// timestamps decrease.
std::vector<AccessEvent> parse_trace(std::istream& in);

/// Writes events in the same JSON Lines format. parse_trace(emit_trace(x))
/// is the identity.
void emit_trace(std::span<const AccessEvent> events, std::ostream& out);

}  // namespace adacache
