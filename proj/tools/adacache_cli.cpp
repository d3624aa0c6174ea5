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

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adacache/errors.hpp"
#include "adacache/pattern.hpp"
#include "adacache/report.hpp"
#include "adacache/sim_config.hpp"
#include "adacache/simulator.hpp"
#include "adacache/stream_tree.hpp"
#include "adacache/trace.hpp"
#include "adacache/workload.hpp"

namespace {

using namespace adacache;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path);
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write " + path);
  }
  return out;
}

std::string padded(std::uint64_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  return digits.size() >= width ? digits : std::string(width - digits.size(), '0') + digits;
}

std::size_t digits_for(std::uint64_t count) {
  return std::to_string(count == 0 ? 0 : count - 1).size();
}

// --------------------------------------------------------------------------
// generate
// --------------------------------------------------------------------------

struct GenerateArgs {
  std::string spec_path;
  std::string trace_out;
  std::string catalog_out;
  std::uint64_t seed = 1;
};

NamespaceCatalog build_catalog(const nlohmann::json& doc) {
  NamespaceCatalog catalog(doc.value("block_size", kDefaultBlockSizeBytes));
  for (const auto& ds : doc.value("datasets", nlohmann::json::array())) {
    const std::string root = ds.at("root").get<std::string>();
    const auto file_size = ds.value("file_size", catalog.block_size_bytes());
    const std::string name_prefix = ds.value("name_prefix", std::string{"f"});
    const std::string dir_prefix = ds.value("dir_prefix", std::string{"d"});
    const std::uint64_t dirs = ds.value("dirs", 0ULL);
    if (dirs == 0) {
      const std::uint64_t items = ds.at("items").get<std::uint64_t>();
      const std::size_t width = digits_for(items);
      for (std::uint64_t i = 0; i < items; ++i) {
        catalog.add_file(root + "/" + name_prefix + padded(i, width), file_size);
      }
      continue;
    }
    std::vector<std::string> file_names;
    if (ds.contains("file_names")) {
      for (const auto& name : ds.at("file_names")) {
        file_names.push_back(name.get<std::string>());
      }
    } else {
      const std::uint64_t per_dir = ds.value("files_per_dir", 1ULL);
      const std::size_t width = digits_for(per_dir);
      for (std::uint64_t i = 0; i < per_dir; ++i) {
        file_names.push_back(name_prefix + padded(i, width));
      }
    }
    const std::size_t dir_width = digits_for(dirs);
    for (std::uint64_t d = 0; d < dirs; ++d) {
      const std::string dir = root + "/" + dir_prefix + padded(d, dir_width);
      for (const auto& name : file_names) {
        catalog.add_file(dir + "/" + name, file_size);
      }
    }
  }
  return catalog;
}

WorkloadSpec parse_workload(const nlohmann::json& w) {
  WorkloadSpec spec;
  spec.pattern = workload_pattern_from_string(w.at("pattern").get<std::string>());
  spec.dataset_root = ItemPath::parse(w.at("dataset_root").get<std::string>());
  spec.item_count = w.at("item_count").get<std::uint64_t>();
  spec.epochs = w.value("epochs", 1U);
  spec.zipf_exponent = w.value("zipf_exponent", 1.0);
  spec.request_count = w.value("request_count", 0ULL);
  spec.inter_request_gap_ms = w.value("gap_ms", 0LL);
  spec.start_ms = w.value("start_ms", 0LL);
  spec.job_id = w.value("job", std::string{"job"});
  spec.within_item = w.value("within_item", std::string{});
  return spec;
}

int run_generate(const GenerateArgs& args) {
  auto in = open_input(args.spec_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("generate spec: ") + e.what());
  }
  const NamespaceCatalog catalog = build_catalog(doc);

  std::vector<AccessEvent> events;
  std::uint64_t workload_index = 0;
  for (const auto& w : doc.value("workloads", nlohmann::json::array())) {
    const WorkloadSpec spec = parse_workload(w);
    const std::uint64_t seed = doc.value("seed", args.seed) + workload_index;
    auto generated = generate_workload(spec, catalog, seed);
    events.insert(events.end(), generated.begin(), generated.end());
    ++workload_index;
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const AccessEvent& a, const AccessEvent& b) { return a.ts_ms < b.ts_ms; });

  auto trace_out = open_output(args.trace_out);
  emit_trace(events, trace_out);
  auto catalog_out = open_output(args.catalog_out);
  catalog.to_json(catalog_out);
  std::cerr << "generated " << events.size() << " events\n";
  return kExitOk;
}

// --------------------------------------------------------------------------
// simulate
// --------------------------------------------------------------------------

struct SimulateArgs {
  std::string trace_path;
  std::string catalog_path;
  std::string out_path;
  std::string config_path;
  double cache_bytes = 0.0;
  std::string policy = "adaptive";
  std::string prefetch = "adaptive";
  std::string alloc = "adaptive";
  std::string ttl = "adaptive";
  double ttl_fixed_ms = 600000.0;
  std::vector<std::string> overrides;
};

int run_simulate(const SimulateArgs& args) {
  auto catalog_in = open_input(args.catalog_path);
  const NamespaceCatalog catalog = NamespaceCatalog::from_json(catalog_in);
  auto trace_in = open_input(args.trace_path);
  const std::vector<AccessEvent> events = parse_trace(trace_in);

  SimConfig config;
  if (!args.config_path.empty()) {
    auto config_in = open_input(args.config_path);
    config.load_file(config_in);
  }
  if (args.cache_bytes > 0.0) {
    config.cache_capacity_bytes = static_cast<std::uint64_t>(args.cache_bytes);
  }
  config.policy_mode = policy_mode_from_string(args.policy);
  config.prefetch_mode = prefetch_mode_from_string(args.prefetch);
  config.alloc_mode = alloc_mode_from_string(args.alloc);
  config.ttl_mode = ttl_mode_from_string(args.ttl);
  config.fixed_ttl_ms = args.ttl_fixed_ms;
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got: " + kv);
    }
    config.apply(kv.substr(0, eq), kv.substr(eq + 1));
  }

  Simulator sim(catalog, config);
  const SimReport report = sim.run(events);
  auto out = open_output(args.out_path);
  out << report.to_json().dump(2) << '\n';
  std::cerr << "report written to " << args.out_path << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------
// recognize
// --------------------------------------------------------------------------

struct RecognizeArgs {
  std::string trace_path;
  std::string catalog_path;
  std::string prefix;
  std::uint64_t skip = 0;
  std::uint64_t count = 0;
  std::size_t window = 100;
  double alpha = 0.01;
};

int run_recognize(const RecognizeArgs& args) {
  auto catalog_in = open_input(args.catalog_path);
  const NamespaceCatalog catalog = NamespaceCatalog::from_json(catalog_in);
  auto trace_in = open_input(args.trace_path);
  std::vector<AccessEvent> events = parse_trace(trace_in);

  if (args.skip >= events.size()) {
    events.clear();
  } else if (args.skip > 0) {
    events.erase(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(args.skip));
  }
  if (args.count > 0 && args.count < events.size()) {
    events.resize(args.count);
  }
  if (events.empty()) {
    throw InsufficientDataError("trace slice is empty");
  }

  TreeConfig tree_config;
  tree_config.window_size = args.window;
  AccessStreamTree tree(tree_config, &catalog);
  AccessStreamNode* first_transition = nullptr;
  for (const auto& event : events) {
    for (const auto& record : tree.record_access(event)) {
      if (record.became_non_trivial && first_transition == nullptr) {
        first_transition = record.node;
      }
    }
  }

  AccessStreamNode* node = nullptr;
  if (!args.prefix.empty()) {
    node = tree.find(args.prefix);
    if (node == nullptr) {
      throw LookupError("no stream with prefix " + args.prefix);
    }
  } else if (first_transition != nullptr) {
    node = first_transition;
  } else {
    // Fullest window wins; ties go to the lexicographically first prefix.
    std::vector<AccessStreamNode*> stack{&tree.root()};
    while (!stack.empty()) {
      AccessStreamNode* cur = stack.back();
      stack.pop_back();
      if (node == nullptr || cur->window().size() > node->window().size() ||
          (cur->window().size() == node->window().size() &&
           cur->path_str() < node->path_str())) {
        node = cur;
      }
      for (const auto& [_, child] : cur->children()) {
        stack.push_back(child.get());
      }
    }
  }

  RecognizerConfig recognizer;
  recognizer.alpha = args.alpha;
  const auto window = node->window().snapshot();
  const std::uint64_t c = tree.dataset_item_count(*node);
  const PatternLabel label = classify(window, c, recognizer);

  const SpatialGaps gaps = spatial_gaps(window);
  std::cout << "stream=" << node->path_str() << " pattern=" << to_string(label)
            << " n=" << window.size() << " c=" << c;
  if (gaps.gaps.size() >= 2) {
    const KsTestResult ks = ks_test_random(gaps.gaps, std::max<std::uint64_t>(c, 2), recognizer);
    std::cout << " d_max=" << ks.d_max << " d_alpha=" << ks.d_alpha;
  }
  std::cout << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------
// report
// --------------------------------------------------------------------------

struct ReportArgs {
  std::string report_path;
  std::string csv_prefix;
};

int run_report(const ReportArgs& args) {
  auto in = open_input(args.report_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  const SimReport report = SimReport::from_json(doc);
  render_report_text(report, std::cout);
  if (!args.csv_prefix.empty()) {
    auto chr_out = open_output(args.csv_prefix + "_chr.csv");
    write_chr_csv(report, chr_out);
    auto quota_out = open_output(args.csv_prefix + "_quota.csv");
    write_quota_csv(report, quota_out);
    std::cerr << "csv written to " << args.csv_prefix << "_chr.csv and " << args.csv_prefix
              << "_quota.csv\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workload-adaptive cache engine and trace-driven simulator"};
  app.require_subcommand(1);

  GenerateArgs generate_args;
  auto* generate = app.add_subcommand("generate", "synthesize a trace and catalog");
  generate->add_option("--spec", generate_args.spec_path, "generator spec (JSON)")->required();
  generate->add_option("--out-trace", generate_args.trace_out, "trace output (JSON Lines)")
      ->required();
  generate->add_option("--out-catalog", generate_args.catalog_out, "catalog output (JSON)")
      ->required();
  generate->add_option("--seed", generate_args.seed, "base RNG seed");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "replay a trace through the cache engine");
  simulate->add_option("--trace", simulate_args.trace_path, "trace file")->required();
  simulate->add_option("--catalog", simulate_args.catalog_path, "catalog file")->required();
  simulate->add_option("--out", simulate_args.out_path, "report output (JSON)")->required();
  simulate->add_option("--cache-bytes", simulate_args.cache_bytes, "total cache capacity");
  simulate->add_option("--config", simulate_args.config_path, "key=value config file");
  simulate->add_option("--policy", simulate_args.policy,
                       "adaptive|lru|fifo|arc-less-baseline|uniform");
  simulate->add_option("--prefetch", simulate_args.prefetch, "adaptive|stride|none");
  simulate->add_option("--alloc", simulate_args.alloc, "adaptive|static");
  simulate->add_option("--ttl", simulate_args.ttl, "adaptive|fixed|none");
  simulate->add_option("--ttl-fixed-ms", simulate_args.ttl_fixed_ms, "fixed TTL value");
  simulate->add_option("--set", simulate_args.overrides, "config override key=value")->take_all();

  RecognizeArgs recognize_args;
  auto* recognize =
      app.add_subcommand("recognize", "classify the access pattern of a trace slice");
  recognize->add_option("--trace", recognize_args.trace_path, "trace file")->required();
  recognize->add_option("--catalog", recognize_args.catalog_path, "catalog file")->required();
  recognize->add_option("--prefix", recognize_args.prefix, "stream prefix to classify");
  recognize->add_option("--skip", recognize_args.skip, "events to skip");
  recognize->add_option("--count", recognize_args.count, "events to keep");
  recognize->add_option("--window", recognize_args.window, "observation window size");
  recognize->add_option("--alpha", recognize_args.alpha, "significance level");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "render a report as tables and CSV");
  report->add_option("--report", report_args.report_path, "report JSON")->required();
  report->add_option("--csv-prefix", report_args.csv_prefix,
                     "write <prefix>_chr.csv and <prefix>_quota.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) {
      return run_generate(generate_args);
    }
    if (simulate->parsed()) {
      return run_simulate(simulate_args);
    }
    if (recognize->parsed()) {
      return run_recognize(recognize_args);
    }
    if (report->parsed()) {
      return run_report(report_args);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
