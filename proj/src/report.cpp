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

#include "adacache/report.hpp"

#include <cstdio>
#include <ostream>

namespace adacache {

namespace {

std::string fmt_chr(const std::optional<double>& chr) {
  if (!chr) {
    return "n/a";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *chr);
  return buf;
}

std::string fmt_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", ms);
  return buf;
}

}  // namespace

void render_report_text(const SimReport& report, std::ostream& out) {
  out << "aggregate: events=" << report.total_events << " hits=" << report.hits
      << " misses=" << report.misses << " ghost_hits=" << report.ghost_hits
      << " chr=" << fmt_chr(report.overall_chr);
  if (report.avg_jct_ms) {
    out << " avg_jct_ms=" << fmt_ms(*report.avg_jct_ms);
  }
  out << "\n";
  out << "prefetch: fetched_bytes=" << report.prefetch_fetched_bytes
      << " used_bytes=" << report.prefetch_used_bytes << "\n";

  if (!report.per_job.empty()) {
    out << "\njobs:\n";
    out << "  job            events     hits   misses     chr        jct_ms\n";
    for (const auto& [id, job] : report.per_job) {
      char line[160];
      std::snprintf(line, sizeof(line), "  %-12s %8llu %8llu %8llu  %6s %13.1f\n", id.c_str(),
                    static_cast<unsigned long long>(job.events),
                    static_cast<unsigned long long>(job.hits),
                    static_cast<unsigned long long>(job.misses), fmt_chr(job.chr).c_str(),
                    job.jct_ms);
      out << line;
    }
  }
  if (!report.per_unit.empty()) {
    out << "\nunits:\n";
    out << "  unit                            policy   pattern     quota_mb  used_mb     hits   misses  ghost\n";
    for (const auto& [id, unit] : report.per_unit) {
      char line[200];
      std::snprintf(line, sizeof(line), "  %-30s %-8s %-10s %9.1f %8.1f %8llu %8llu %6llu%s\n",
                    id.c_str(), unit.policy.c_str(),
                    unit.pattern.empty() ? "-" : unit.pattern.c_str(),
                    static_cast<double>(unit.quota_bytes) / (1024.0 * 1024.0),
                    static_cast<double>(unit.used_bytes) / (1024.0 * 1024.0),
                    static_cast<unsigned long long>(unit.hits),
                    static_cast<unsigned long long>(unit.misses),
                    static_cast<unsigned long long>(unit.ghost_hits),
                    unit.expired ? " (expired)" : "");
      out << line;
    }
  }
  if (!report.per_stream.empty()) {
    out << "\nstreams:\n";
    for (const auto& [prefix, stream] : report.per_stream) {
      out << "  " << prefix << ": " << stream.pattern << " (recognized at "
          << fmt_ms(stream.transition_ms) << " ms)\n";
    }
  }
}

void write_chr_csv(const SimReport& report, std::ostream& out) {
  out << "t_ms,overall";
  for (const auto& [id, _] : report.per_job) {
    out << "," << id;
  }
  out << "\n";
  for (const auto& point : report.chr_timeline) {
    out << point.t_ms << "," << (point.overall ? std::to_string(*point.overall) : "");
    for (const auto& [id, _] : report.per_job) {
      const auto it = point.per_job.find(id);
      out << ",";
      if (it != point.per_job.end() && it->second) {
        out << *it->second;
      }
    }
    out << "\n";
  }
}

void write_quota_csv(const SimReport& report, std::ostream& out) {
  out << "t_ms,unit,quota_bytes,benefit_per_s\n";
  for (const auto& point : report.allocation_timeline) {
    for (const auto& [id, unit] : point.units) {
      out << point.t_ms << "," << id << "," << unit.quota_bytes << "," << unit.benefit_per_s
          << "\n";
    }
  }
}

}  // namespace adacache
