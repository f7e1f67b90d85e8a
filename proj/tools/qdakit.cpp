// Copyright 2026 The qdakit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qdakit command line. The project root comes from --project, else the
// QDAKIT_PROJECT environment variable, else the working directory.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qdakit/qdakit.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code(qdakit::ErrorCode code) {
  using qdakit::ErrorCode;
  switch (code) {
    case ErrorCode::kConfiguration:
    case ErrorCode::kValidation: return 2;
    case ErrorCode::kDependency:
    case ErrorCode::kStale: return 3;
    case ErrorCode::kNotFound:
    case ErrorCode::kLookup: return 4;
    case ErrorCode::kConflict: return 5;
    default: return 1;
  }
}

struct Options {
  std::string project;
  bool json_output = false;
  std::vector<std::string> overrides;  // key=value
};

fs::path project_root(const Options& o) {
  if (!o.project.empty()) return o.project;
  if (const char* env = std::getenv("QDAKIT_PROJECT"); env != nullptr && *env != '\0') return env;
  return fs::current_path();
}

qdakit::PipelineConfig effective_config(const fs::path& root, const Options& o) {
  auto config = qdakit::load_config(root);
  for (const auto& kv : o.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw qdakit::Error(qdakit::ErrorCode::kConfiguration, "--set expects key=value, got '" + kv + "'");
    }
    config.set(qdakit::text::trim(std::string_view(kv).substr(0, eq)),
               qdakit::text::trim(std::string_view(kv).substr(eq + 1)));
  }
  config.validate();
  return config;
}

void emit(const Options& o, const json& j, const std::string& plain) {
  if (o.json_output) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << plain;
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string default_config_text() {
  return "# qdakit pipeline configuration (key = value)\n" + qdakit::PipelineConfig{}.to_text();
}

int cmd_init(const Options& o, bool synthetic, std::uint64_t seed) {
  const fs::path root = project_root(o);
  qdakit::Project::init(root);
  if (!fs::exists(root / std::string(qdakit::kConfigFile))) {
    qdakit::atomic_write(root / std::string(qdakit::kConfigFile), default_config_text());
  }
  if (synthetic) qdakit::write_synthetic(root, seed);
  emit(o, {{"project", root.string()}, {"synthetic", synthetic}},
       "initialised " + root.string() + (synthetic ? " with the synthetic corpus" : "") + "\n");
  return 0;
}

int cmd_generate(const Options& o, const std::string& dir, std::uint64_t seed) {
  const fs::path root = dir.empty() ? project_root(o) : fs::path(dir);
  qdakit::write_synthetic(root, seed);
  emit(o, {{"root", root.string()}, {"seed", seed}},
       "wrote synthetic inputs under " + root.string() + "\n");
  return 0;
}

int cmd_run(const Options& o, const std::vector<std::string>& stage_names, bool force) {
  const fs::path root = project_root(o);
  auto config = effective_config(root, o);
  auto project = qdakit::Project::open(root);
  qdakit::ProjectLock lock(root);
  qdakit::Pipeline pipeline(project, config);
  std::vector<qdakit::Stage> stages;
  for (const auto& s : stage_names) stages.push_back(qdakit::parse_stage(s));
  json summary = json::array();
  std::string plain;
  int status = 0;
  try {
    for (const auto& outcome : pipeline.run(stages, force)) {
      summary.push_back(outcome.to_json());
      plain += qdakit::to_string(outcome.stage) + ": " + (outcome.ran ? "ran" : "fresh") + " (" +
               std::to_string(outcome.artifacts.size()) + " artifacts)\n";
    }
  } catch (const qdakit::Error& e) {
    summary.push_back({{"error", qdakit::error_body(e)["error"]}});
    plain += std::string("error: ") + e.what() + "\n";
    status = exit_code(e.code());
  }
  print_warnings(pipeline.diagnostics().warnings());
  emit(o, {{"stages", summary}, {"exit_code", status}}, plain);
  return status;
}

int cmd_status(const Options& o) {
  const fs::path root = project_root(o);
  auto project = qdakit::Project::open(root);
  qdakit::Pipeline pipeline(project, effective_config(root, o));
  json states = json::object();
  std::string plain;
  for (auto s : qdakit::kStageOrder) {
    const std::string state = qdakit::to_string(pipeline.state(s));
    states[qdakit::to_string(s)] = state;
    plain += qdakit::to_string(s) + ": " + state + "\n";
  }
  emit(o, {{"stages", states}}, plain);
  return 0;
}

int cmd_report(const Options& o) {
  const fs::path root = project_root(o);
  auto project = qdakit::Project::open(root);
  qdakit::ProjectLock lock(root);
  qdakit::Pipeline pipeline(project, effective_config(root, o));
  auto outcome = pipeline.run_stage(qdakit::Stage::kReport);
  print_warnings(outcome.warnings);
  json report = json::parse(project.load_artifact("report.json"));
  std::string plain;
  for (const auto& a : outcome.artifacts) plain += (root / "artifacts" / a).string() + "\n";
  emit(o, {{"artifacts", outcome.artifacts}, {"report", report}}, plain);
  return 0;
}

int cmd_serve(const Options& o, const std::string& host, int port) {
  const fs::path root = project_root(o);
  qdakit::ProjectLock lock(root);
  qdakit::ReviewService service(qdakit::Project::open(root), effective_config(root, o));
  qdakit::ReviewServer server(service, host);
  std::cerr << "serving " << root.string() << " on http://" << host << ":" << port << "\n";
  server.run(port);
  return 0;
}

int cmd_dict_get(const Options& o, const std::string& key) {
  const fs::path root = project_root(o);
  qdakit::ReviewService service(qdakit::Project::open(root), effective_config(root, o));
  json j = service.get_dictionary(key);
  emit(o, j, j["key"].get<std::string>() + " -> " + j["lemma"].get<std::string>() + " (version " +
                 std::to_string(j["version"].get<std::uint64_t>()) + ")\n");
  return 0;
}

int cmd_dict_set(const Options& o, const std::string& key, const std::string& lemma,
                 std::optional<std::uint64_t> expected) {
  const fs::path root = project_root(o);
  qdakit::ProjectLock lock(root);
  qdakit::ReviewService service(qdakit::Project::open(root), effective_config(root, o));
  json j = service.put_dictionary(key, lemma, expected);
  emit(o, j, std::string(j["changed"].get<bool>() ? "updated" : "unchanged") + ", version " +
                 std::to_string(j["version"].get<std::uint64_t>()) + "\n");
  return 0;
}

int cmd_review_list(const Options& o, const qdakit::SegmentFilter& filter) {
  const fs::path root = project_root(o);
  qdakit::ReviewService service(qdakit::Project::open(root), effective_config(root, o));
  json j = service.list_segments(filter);
  std::string plain;
  for (const auto& s : j["segments"]) {
    plain += s["id"].get<std::string>() + "\t" + s["status"].get<std::string>() + "\t" +
             qdakit::text::join(s["categories"].get<std::vector<std::string>>(), ";") + "\t" +
             s.value("text", "") + "\n";
  }
  plain += "page " + std::to_string(j["page"].get<std::size_t>()) + "/" +
           std::to_string(j["pages"].get<std::size_t>()) + ", " +
           std::to_string(j["total"].get<std::size_t>()) + " segments\n";
  emit(o, j, plain);
  return 0;
}

int cmd_review_action(const Options& o, qdakit::ReviewAction action) {
  const fs::path root = project_root(o);
  qdakit::ProjectLock lock(root);
  qdakit::ReviewService service(qdakit::Project::open(root), effective_config(root, o));
  json j = service.apply_action(action);
  emit(o, j, j["id"].get<std::string>() + ": " + j["status"].get<std::string>() + "\n");
  return 0;
}

int cmd_import_validated(const Options& o, const std::string& file) {
  const fs::path root = project_root(o);
  qdakit::Project::open(root);
  const std::string content = qdakit::read_file(file);
  auto segments = qdakit::segments_from_csv(content);
  qdakit::atomic_write(root / "inputs/validated_segments.csv", content);
  emit(o, {{"imported", segments.size()}},
       "imported " + std::to_string(segments.size()) + " validated segments\n");
  return 0;
}

int cmd_export_graph(const Options& o, const std::string& name, const std::string& format,
                     const std::string& out) {
  const fs::path root = project_root(o);
  qdakit::ReviewService service(qdakit::Project::open(root), effective_config(root, o));
  auto [content, type] = service.graph(name, format);
  if (out.empty()) {
    std::cout << content;
  } else {
    qdakit::atomic_write(out, content);
    if (o.json_output) std::cout << json{{"written", out}, {"media_type", type}}.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdakit: corpus-driven qualitative coding pipeline"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-p,--project", o.project, "Project root (default: $QDAKIT_PROJECT or cwd)");
  app.add_flag("--json", o.json_output, "Machine-readable output");
  app.add_option("--set", o.overrides, "Override a config key for this invocation (key=value)");

  bool synthetic = false;
  std::uint64_t seed = qdakit::kDefaultSyntheticSeed;
  auto* init = app.add_subcommand("init", "Create a project directory");
  init->add_flag("--synthetic", synthetic, "Populate inputs with the synthetic corpus");
  init->add_option("--seed", seed, "Synthetic corpus seed");

  std::string gen_dir;
  auto* gen = app.add_subcommand("generate-synthetic", "Write the synthetic corpus");
  gen->add_option("dir", gen_dir, "Target root (default: project root)");
  gen->add_option("--seed", seed, "Seed");

  std::vector<std::string> stages;
  bool force = false;
  auto* run = app.add_subcommand("run", "Run pipeline stages (all by default)");
  run->add_option("stages", stages, "Stages to run");
  run->add_flag("--force", force, "Recompute fresh stages too");

  auto* status = app.add_subcommand("status", "Show stage freshness");
  auto* report = app.add_subcommand("report", "Regenerate the report bundle");

  std::string host = "127.0.0.1";
  int port = 8765;
  auto* serve = app.add_subcommand("serve", "Serve the review API on loopback");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");

  auto* dict = app.add_subcommand("dict", "Inspect or edit the lemma dictionary");
  dict->require_subcommand(1);
  std::string key;
  std::string lemma;
  std::optional<std::uint64_t> expected_version;
  auto* dict_get = dict->add_subcommand("get", "Show one entry");
  dict_get->add_option("key", key)->required();
  auto* dict_set = dict->add_subcommand("set", "Set a key's lemma");
  dict_set->add_option("key", key)->required();
  dict_set->add_option("lemma", lemma)->required();
  dict_set->add_option("--expected-version", expected_version, "Fail unless at this version");

  auto* review = app.add_subcommand("review", "List or act on coded segments");
  review->require_subcommand(1);
  qdakit::SegmentFilter filter;
  std::string f_set, f_status, f_category, f_document, f_polarity;
  auto* rlist = review->add_subcommand("list", "List segments");
  rlist->add_option("--set", f_set);
  rlist->add_option("--status", f_status);
  rlist->add_option("--category", f_category);
  rlist->add_option("--document", f_document);
  rlist->add_option("--polarity", f_polarity);
  rlist->add_option("--page", filter.page);
  rlist->add_option("--page-size", filter.page_size);
  qdakit::ReviewAction action;
  std::string categories;
  std::optional<std::uint64_t> expected_revision;
  auto* ract = review->add_subcommand("action", "Accept, reject or reassign a segment");
  ract->add_option("segment", action.segment, "Segment id <document>:<sentence>")->required();
  ract->add_option("action", action.action, "accept | reject | reassign")->required();
  ract->add_option("--categories", categories, "Comma-separated, for reassign");
  ract->add_option("--note", action.note);
  ract->add_option("--expected-revision", expected_revision);

  std::string import_file;
  auto* import = app.add_subcommand("import-validated", "Import analyst-validated segments (CSV)");
  import->add_option("file", import_file)->required();

  std::string graph_name, graph_format = "graphml", graph_out;
  auto* exp = app.add_subcommand("export-graph", "Export a graph artifact");
  exp->add_option("name", graph_name, "<graph|graph_segments|ego>.<set>")->required();
  exp->add_option("--format", graph_format, "graphml | dot | csv | json");
  exp->add_option("-o,--out", graph_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) return cmd_init(o, synthetic, seed);
    if (*gen) return cmd_generate(o, gen_dir, seed);
    if (*run) return cmd_run(o, stages, force);
    if (*status) return cmd_status(o);
    if (*report) return cmd_report(o);
    if (*serve) return cmd_serve(o, host, port);
    if (*dict_get) return cmd_dict_get(o, key);
    if (*dict_set) return cmd_dict_set(o, key, lemma, expected_version);
    if (*rlist) {
      if (!f_set.empty()) filter.set = qdakit::parse_set_label(f_set);
      if (!f_status.empty()) filter.status = qdakit::parse_review_status(f_status);
      if (!f_category.empty()) filter.category = f_category;
      if (!f_document.empty()) filter.document = f_document;
      if (!f_polarity.empty()) filter.polarity = f_polarity;
      return cmd_review_list(o, filter);
    }
    if (*ract) {
      for (const auto& c : qdakit::text::split(categories, ',')) {
        if (!c.empty()) action.categories.push_back(c);
      }
      action.expected_revision = expected_revision;
      return cmd_review_action(o, action);
    }
    if (*import) return cmd_import_validated(o, import_file);
    if (*exp) return cmd_export_graph(o, graph_name, graph_format, graph_out);
  } catch (const qdakit::Error& e) {
    if (o.json_output) {
      std::cout << qdakit::error_body(e).dump(2) << "\n";
    }
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
