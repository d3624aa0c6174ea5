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

#include <iosfwd>
#include <string>

#include "adacache/simulator.hpp"

namespace adacache {

/// Renders a report as human-readable tables.
void render_report_text(const SimReport& report, std::ostream& out);

/// CHR-over-time plot data: t_ms, overall, then one column per job.
void write_chr_csv(const SimReport& report, std::ostream& out);

/// Quota/benefit timeline plot data: t_ms, unit, quota_bytes, benefit_per_s.
void write_quota_csv(const SimReport& report, std::ostream& out);

}  // namespace adacache
