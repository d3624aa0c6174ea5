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

#include "adacache/trace.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "adacache/errors.hpp"

namespace adacache {

std::vector<AccessEvent> parse_trace(std::istream& in) {
  std::vector<AccessEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    AccessEvent ev;
    try {
      const nlohmann::json doc = nlohmann::json::parse(line);
      ev.ts_ms = doc.at("ts_ms").get<std::int64_t>();
      ev.path = ItemPath::parse(doc.at("path").get<std::string>());
      ev.offset_bytes = doc.at("offset").get<std::uint64_t>();
      ev.length_bytes = doc.at("length").get<std::uint64_t>();
      ev.job_id = doc.at("job").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (ev.length_bytes == 0) {
      throw ParseError("trace line " + std::to_string(line_no) + ": length must be positive");
    }
    if (!events.empty() && ev.ts_ms < events.back().ts_ms) {
      throw OrderingError("trace line " + std::to_string(line_no) +
                          ": timestamp decreases (" + std::to_string(ev.ts_ms) + " after " +
                          std::to_string(events.back().ts_ms) + ")");
    }
    events.push_back(std::move(ev));
  }
  return events;
}

void emit_trace(std::span<const AccessEvent> events, std::ostream& out) {
  for (const auto& ev : events) {
    nlohmann::ordered_json doc;
    doc["ts_ms"] = ev.ts_ms;
    doc["path"] = ev.path.str();
    doc["offset"] = ev.offset_bytes;
    doc["length"] = ev.length_bytes;
    doc["job"] = ev.job_id;
    out << doc.dump() << '\n';
  }
}

}  // namespace adacache
