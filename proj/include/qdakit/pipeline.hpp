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

// Stage orchestration over a project directory.
//
// Each stage reads upstream artifacts, writes its outputs and a marker
// artifact "stage.<name>" listing the outputs and their hashes. A stage is
// fresh when its marker and every listed output are present, unchanged and
// not stale. Inputs that are not artifacts are resolved here:
//
//   source:<set>          the set's inputs/<set>/*.txt files
//   source:contractions   inputs/contractions.csv, or the bundled table
//   stopwords, wordlists  inputs/stopwords/*.txt, inputs/wordlists/*.txt
//   validated             inputs/validated_segments.csv
//   param:<stage>         the configuration keys the stage reads

#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qdakit/coding.hpp"
#include "qdakit/corpus.hpp"
#include "qdakit/error.hpp"
#include "qdakit/graph.hpp"
#include "qdakit/graph_io.hpp"
#include "qdakit/lexicon.hpp"
#include "qdakit/matrix.hpp"
#include "qdakit/project_store.hpp"

namespace qdakit {

enum class Stage {
  kIngest,
  kVocab,
  kLemmatise,
  kTdm,
  kFilter,
  kCategories,
  kSearch,
  kAnnotate,
  kRelations,
  kGraph,
  kCluster,
  kSignificance,
  kReport
};

inline constexpr std::array<Stage, 13> kStageOrder = {
    Stage::kIngest,   Stage::kVocab,     Stage::kLemmatise, Stage::kTdm,
    Stage::kFilter,   Stage::kCategories, Stage::kSearch,   Stage::kAnnotate,
    Stage::kRelations, Stage::kGraph,    Stage::kCluster,   Stage::kSignificance,
    Stage::kReport};

inline std::string to_string(Stage s) {
  switch (s) {
    case Stage::kIngest: return "ingest";
    case Stage::kVocab: return "vocab";
    case Stage::kLemmatise: return "lemmatise";
    case Stage::kTdm: return "tdm";
    case Stage::kFilter: return "filter";
    case Stage::kCategories: return "categories";
    case Stage::kSearch: return "search";
    case Stage::kAnnotate: return "annotate";
    case Stage::kRelations: return "relations";
    case Stage::kGraph: return "graph";
    case Stage::kCluster: return "cluster";
    case Stage::kSignificance: return "significance";
    case Stage::kReport: return "report";
  }
  return "";
}

inline Stage parse_stage(std::string_view s) {
  for (Stage st : kStageOrder) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorCode::kConfiguration, "unknown stage '" + std::string(s) + "'");
}

inline std::vector<Stage> stage_dependencies(Stage s) {
  switch (s) {
    case Stage::kIngest: return {};
    case Stage::kVocab: return {Stage::kIngest};
    case Stage::kLemmatise: return {Stage::kVocab};
    case Stage::kTdm: return {Stage::kLemmatise};
    case Stage::kFilter: return {Stage::kTdm};
    case Stage::kCategories: return {Stage::kTdm};
    case Stage::kSearch: return {Stage::kFilter, Stage::kCategories};
    case Stage::kAnnotate: return {Stage::kSearch};
    case Stage::kRelations: return {Stage::kAnnotate};
    case Stage::kGraph: return {Stage::kAnnotate};
    case Stage::kCluster: return {Stage::kGraph};
    case Stage::kSignificance: return {Stage::kCluster};
    case Stage::kReport: return {Stage::kSignificance, Stage::kRelations};
  }
  return {};
}

enum class Granularity { kDocument, kSentence };

inline std::string to_string(Granularity g) {
  return g == Granularity::kDocument ? "document" : "sentence";
}

inline Granularity parse_granularity(std::string_view s) {
  if (s == "document") return Granularity::kDocument;
  if (s == "sentence") return Granularity::kSentence;
  throw Error(ErrorCode::kConfiguration, "unknown granularity '" + std::string(s) + "'");
}

struct PipelineConfig {
  int version = 1;
  double low_pct = 1;
  double high_pct = 99;
  PercentileMode percentile_mode = PercentileMode::kTotals;
  double corr_start = 1.0;
  double corr_step = 0.05;
  double coverage_target = 0.5;
  double corr_floor = 0.5;
  double outlier_ratio = 2.0;
  std::size_t proximity_window = 1;
  Granularity cooccurrence_granularity = Granularity::kDocument;
  std::size_t min_cluster_size = 2;
  double alpha = 0.05;
  std::string ego_focus = "antibiotic";
  std::vector<std::string> ego_extras = {"antiviral"};

  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k = {
        "version",        "low_pct",         "high_pct",         "percentile_mode",
        "corr_start",     "corr_step",       "coverage_target",  "corr_floor",
        "outlier_ratio",  "proximity_window", "cooccurrence_granularity",
        "min_cluster_size", "alpha",         "ego_focus",        "ego_extras"};
    return k;
  }

  std::string get(std::string_view key) const {
    if (key == "version") return std::to_string(version);
    if (key == "low_pct") return text::format_double(low_pct);
    if (key == "high_pct") return text::format_double(high_pct);
    if (key == "percentile_mode") return to_string(percentile_mode);
    if (key == "corr_start") return text::format_double(corr_start);
    if (key == "corr_step") return text::format_double(corr_step);
    if (key == "coverage_target") return text::format_double(coverage_target);
    if (key == "corr_floor") return text::format_double(corr_floor);
    if (key == "outlier_ratio") return text::format_double(outlier_ratio);
    if (key == "proximity_window") return std::to_string(proximity_window);
    if (key == "cooccurrence_granularity") return to_string(cooccurrence_granularity);
    if (key == "min_cluster_size") return std::to_string(min_cluster_size);
    if (key == "alpha") return text::format_double(alpha);
    if (key == "ego_focus") return ego_focus;
    if (key == "ego_extras") return text::join(ego_extras, ",");
    throw Error(ErrorCode::kConfiguration, "unknown config key '" + std::string(key) + "'");
  }

  void set(std::string_view key, std::string_view value) {
    const std::string k(key);
    auto number = [&] { return text::parse_double(value, k); };
    auto count = [&] {
      long long v = text::parse_int(value, k);
      if (v < 0) throw Error(ErrorCode::kConfiguration, k + " must be >= 0");
      return static_cast<std::size_t>(v);
    };
    if (key == "version") {
      version = static_cast<int>(text::parse_int(value, k));
    } else if (key == "low_pct") {
      low_pct = number();
    } else if (key == "high_pct") {
      high_pct = number();
    } else if (key == "percentile_mode") {
      percentile_mode = parse_percentile_mode(value);
    } else if (key == "corr_start") {
      corr_start = number();
    } else if (key == "corr_step") {
      corr_step = number();
    } else if (key == "coverage_target") {
      coverage_target = number();
    } else if (key == "corr_floor") {
      corr_floor = number();
    } else if (key == "outlier_ratio") {
      outlier_ratio = number();
    } else if (key == "proximity_window") {
      proximity_window = count();
    } else if (key == "cooccurrence_granularity") {
      cooccurrence_granularity = parse_granularity(value);
    } else if (key == "min_cluster_size") {
      min_cluster_size = count();
    } else if (key == "alpha") {
      alpha = number();
    } else if (key == "ego_focus") {
      ego_focus = std::string(text::trim(value));
    } else if (key == "ego_extras") {
      ego_extras.clear();
      for (const auto& e : text::split(value, ',')) {
        std::string_view t = text::trim(e);
        if (!t.empty()) ego_extras.emplace_back(t);
      }
    } else {
      throw Error(ErrorCode::kConfiguration, "unknown config key '" + k + "'");
    }
  }

  void validate() const {
    check_cuts(low_pct, high_pct);
    search_params().validate();
    if (!(outlier_ratio > 0)) throw Error(ErrorCode::kConfiguration, "outlier_ratio must be > 0");
    if (min_cluster_size < 1) {
      throw Error(ErrorCode::kConfiguration, "min_cluster_size must be >= 1");
    }
    if (!(alpha > 0 && alpha < 1)) throw Error(ErrorCode::kConfiguration, "alpha must lie in (0, 1)");
    if (ego_focus.empty()) throw Error(ErrorCode::kConfiguration, "ego_focus must be set");
  }

  SearchParams search_params() const {
    return {corr_start, corr_step, coverage_target, corr_floor};
  }

  // "key = value" lines in keys() order.
  std::string to_text() const {
    std::string out;
    for (const auto& k : keys()) out += k + " = " + get(k) + "\n";
    return out;
  }

  // Unset keys keep their defaults; '#' starts a comment line.
  static PipelineConfig from_text(std::string_view content) {
    PipelineConfig c;
    std::size_t line_no = 0;
    for (const auto& line : text::split_lines(content)) {
      ++line_no;
      std::string_view l = text::trim(line);
      if (l.empty() || l[0] == '#') continue;
      auto eq = l.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::kConfiguration,
                    "config line " + std::to_string(line_no) + ": expected key = value");
      }
      c.set(text::trim(l.substr(0, eq)), text::trim(l.substr(eq + 1)));
    }
    c.validate();
    return c;
  }

  // The keys a stage reads, as text; hashed into the stage's inputs.
  std::string stage_params(Stage s) const {
    std::vector<std::string> used;
    switch (s) {
      case Stage::kFilter:
      case Stage::kCategories: used = {"low_pct", "high_pct", "percentile_mode"}; break;
      case Stage::kSearch:
        used = {"corr_start", "corr_step", "coverage_target", "corr_floor", "outlier_ratio"};
        break;
      case Stage::kRelations: used = {"proximity_window"}; break;
      case Stage::kGraph: used = {"cooccurrence_granularity"}; break;
      case Stage::kCluster: used = {"min_cluster_size"}; break;
      case Stage::kSignificance: used = {"alpha"}; break;
      case Stage::kReport: used = keys(); break;  // the report embeds the whole config
      default: break;
    }
    std::string out;
    for (const auto& k : used) out += k + "=" + get(k) + "\n";
    return out;
  }
};

inline constexpr std::string_view kConfigFile = "qdakit.conf";

// Per-segment review decisions, keyed by "<document>:<sentence>".
struct ReviewEntry {
  ReviewStatus status = ReviewStatus::kAuto;
  std::vector<std::string> categories;  // replacement categories when reassigned
  std::uint64_t revision = 0;

  friend bool operator==(const ReviewEntry&, const ReviewEntry&) = default;
};

struct ReviewState {
  std::map<std::string, ReviewEntry> entries;

  static std::pair<std::string, std::size_t> split_key(std::string_view key) {
    auto colon = key.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw Error(ErrorCode::kValidation, "malformed segment id '" + std::string(key) + "'");
    }
    const long long s = text::parse_int(key.substr(colon + 1), "sentence index");
    if (s < 0) throw Error(ErrorCode::kValidation, "malformed segment id '" + std::string(key) + "'");
    return {std::string(key.substr(0, colon)), static_cast<std::size_t>(s)};
  }

  std::string to_csv() const {
    std::string out = "segment,status,categories,revision\n";
    for (const auto& [k, e] : entries) {
      out += csv::row({k, to_string(e.status), text::join(e.categories, ";"),
                       std::to_string(e.revision)});
    }
    return out;
  }

  static ReviewState from_csv(std::string_view content) {
    ReviewState s;
    auto rows = csv::parse(content);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() != 4) throw Error(ErrorCode::kValidation, "review state CSV: 4 columns");
      ReviewEntry e;
      e.status = parse_review_status(r[1]);
      if (!r[2].empty()) e.categories = text::split(r[2], ';');
      e.revision = static_cast<std::uint64_t>(text::parse_int(r[3], "revision"));
      s.entries[r[0]] = std::move(e);
    }
    return s;
  }

  // Applies statuses and reassigned categories; returns keys without a
  // matching segment (orphaned decisions).
  std::vector<std::string> apply(std::vector<CodedSegment>& segments) const {
    std::set<std::string> matched;
    for (auto& seg : segments) {
      auto it = entries.find(seg.key());
      if (it == entries.end()) continue;
      matched.insert(it->first);
      seg.status = it->second.status;
      if (it->second.status == ReviewStatus::kReassigned) seg.categories = it->second.categories;
    }
    std::vector<std::string> orphans;
    for (const auto& [k, e] : entries) {
      if (matched.count(k) == 0) orphans.push_back(k);
    }
    return orphans;
  }
};

inline std::string codebook_to_csv(const Codebook& book) {
  std::string out = "surface,parent,categories\n";
  for (const auto& c : book.codes) {
    auto it = book.categories_of.find(c.parent);
    out += csv::row({c.surface, c.parent,
                     it == book.categories_of.end() ? "" : text::join(it->second, ";")});
  }
  return out;
}

inline Codebook codebook_from_csv(std::string_view content) {
  Codebook book;
  auto rows = csv::parse(content);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw Error(ErrorCode::kValidation, "codebook CSV: 3 columns");
    book.codes.push_back({r[0], r[1]});
    book.categories_of[r[1]] = r[2].empty() ? std::vector<std::string>{} : text::split(r[2], ';');
  }
  return book;
}

inline std::string outliers_to_csv(const std::vector<OutlierFlag>& flags) {
  std::string out = "category,transitional_codes,flagged\n";
  for (const auto& f : flags) {
    out += csv::row({f.category, std::to_string(f.transitional_codes), f.flagged ? "1" : "0"});
  }
  return out;
}

enum class StageState { kMissing, kStale, kFresh };

inline std::string to_string(StageState s) {
  switch (s) {
    case StageState::kMissing: return "missing";
    case StageState::kStale: return "stale";
    case StageState::kFresh: return "fresh";
  }
  return "";
}

struct StageOutcome {
  Stage stage = Stage::kIngest;
  bool ran = false;
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    return {{"stage", to_string(stage)},
            {"status", ran ? "ran" : "fresh"},
            {"artifacts", artifacts},
            {"warnings", warnings}};
  }
};

struct DictionaryEditResult {
  bool changed = false;
  std::uint64_t version = 0;
};

namespace detail {

// Hash over the names and contents of the *.txt files of a directory.
inline std::string directory_fingerprint(const std::filesystem::path& dir) {
  std::string listing;
  for (const auto& path : list_text_files(dir)) {
    listing += path.filename().string() + "\t" + sha256_hex(read_file(path)) + "\n";
  }
  return sha256_hex(listing);
}

inline std::string file_fingerprint(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) return "absent";
  return sha256_hex(read_file(path));
}

}  // namespace detail

class Pipeline {
 public:
  Pipeline(Project& project, PipelineConfig config)
      : project_(project), config_(std::move(config)) {
    config_.validate();
    const auto root = project_.root();
    const PipelineConfig cfg = config_;
    project_.set_resolver([root, cfg](std::string_view key) -> std::optional<std::string> {
      const std::string k(key);
      if (k.rfind("source:", 0) == 0) {
        const std::string what = k.substr(7);
        if (what == "contractions") return detail::file_fingerprint(root / "inputs/contractions.csv");
        return detail::directory_fingerprint(root / "inputs" / what);
      }
      if (k == "stopwords") return detail::directory_fingerprint(root / "inputs/stopwords");
      if (k == "wordlists") return detail::directory_fingerprint(root / "inputs/wordlists");
      if (k == "validated") {
        return detail::file_fingerprint(root / "inputs/validated_segments.csv");
      }
      if (k.rfind("param:", 0) == 0) return sha256_hex(cfg.stage_params(parse_stage(k.substr(6))));
      return std::nullopt;
    });
  }

  const PipelineConfig& config() const { return config_; }
  Project& project() { return project_; }
  const Project& project() const { return project_; }
  const Diagnostics& diagnostics() const { return diag_; }

  static std::string marker(Stage s) { return "stage." + to_string(s); }

  // Output artifact -> hash, as recorded by the stage's last run.
  std::map<std::string, std::string> recorded_outputs(Stage s) const {
    std::map<std::string, std::string> out;
    if (!project_.has(marker(s))) return out;
    std::string content;
    try {
      content = project_.load_artifact(marker(s), true);
    } catch (const Error&) {
      return out;
    }
    for (const auto& line : text::split_lines(content)) {
      auto f = text::split(line, '\t');
      if (f.size() == 2) out[f[0]] = f[1];
    }
    return out;
  }

  StageState state(Stage s) const {
    const auto* m = project_.entry(marker(s));
    if (m == nullptr) return StageState::kMissing;
    if (project_.is_stale(marker(s))) return StageState::kStale;
    auto outputs = recorded_outputs(s);
    for (const auto& [name, hash] : outputs) {
      const auto* e = project_.entry(name);
      if (e == nullptr || e->sha256 != hash || project_.is_stale(name)) return StageState::kStale;
    }
    try {
      project_.load_artifact(marker(s));
    } catch (const Error&) {
      return StageState::kStale;
    }
    return StageState::kFresh;
  }

  // Upstream stages (transitively) that are not fresh, in pipeline order.
  std::vector<Stage> blocking_upstream(Stage s) const {
    std::set<Stage> needed;
    std::vector<Stage> stack = stage_dependencies(s);
    while (!stack.empty()) {
      Stage d = stack.back();
      stack.pop_back();
      if (!needed.insert(d).second) continue;
      for (Stage dd : stage_dependencies(d)) stack.push_back(dd);
    }
    std::vector<Stage> out;
    for (Stage st : kStageOrder) {
      if (needed.count(st) != 0 && state(st) != StageState::kFresh) out.push_back(st);
    }
    return out;
  }

  // Runs one stage; fresh stages are skipped unless forced.
  StageOutcome run_stage(Stage s, bool force = false) {
    auto blocking = blocking_upstream(s);
    if (!blocking.empty()) {
      std::vector<std::string> names;
      for (Stage b : blocking) names.push_back(to_string(b));
      throw Error(ErrorCode::kDependency, "stage '" + to_string(s) +
                                              "' needs fresh upstream stages; run first: " +
                                              text::join(names, ", "));
    }
    StageOutcome outcome;
    outcome.stage = s;
    if (!force && state(s) == StageState::kFresh) {
      for (const auto& [name, hash] : recorded_outputs(s)) outcome.artifacts.push_back(name);
      return outcome;
    }
    const std::size_t warn_start = diag_.warnings().size();
    inputs_.clear();
    outputs_.clear();
    switch (s) {
      case Stage::kIngest: ingest(); break;
      case Stage::kVocab: vocab(); break;
      case Stage::kLemmatise: lemmatise(); break;
      case Stage::kTdm: tdm(); break;
      case Stage::kFilter: filter(); break;
      case Stage::kCategories: categories(); break;
      case Stage::kSearch: search(); break;
      case Stage::kAnnotate: annotate(); break;
      case Stage::kRelations: relations(); break;
      case Stage::kGraph: graph(); break;
      case Stage::kCluster: cluster(); break;
      case Stage::kSignificance: significance(); break;
      case Stage::kReport: report(); break;
    }
    std::string listing;
    for (const auto& out : outputs_) {
      auto e = project_.save_artifact(out.name, out.content, to_string(s), inputs_,
                                      out.dict_version);
      listing += out.name + "\t" + e.sha256 + "\n";
      outcome.artifacts.push_back(out.name);
    }
    project_.save_artifact(marker(s), listing, to_string(s), inputs_, dict_version_);
    outcome.ran = true;
    for (std::size_t i = warn_start; i < diag_.warnings().size(); ++i) {
      outcome.warnings.push_back(diag_.warnings()[i]);
    }
    return outcome;
  }

  // Runs the given stages (all when empty) in pipeline order. Stops at the
  // first failure by rethrowing.
  std::vector<StageOutcome> run(const std::vector<Stage>& stages = {}, bool force = false) {
    project_.save_artifact("config.effective", config_.to_text(), "config");
    std::vector<StageOutcome> out;
    for (Stage s : kStageOrder) {
      if (!stages.empty() && std::find(stages.begin(), stages.end(), s) == stages.end()) continue;
      out.push_back(run_stage(s, force));
    }
    return out;
  }

  // Sets with an ingested corpus.
  std::vector<SetLabel> ingested_sets() const {
    auto outputs = recorded_outputs(Stage::kIngest);
    std::vector<SetLabel> out;
    for (SetLabel l : kAllSets) {
      if (outputs.count(corpus_name(l)) != 0) out.push_back(l);
    }
    return out;
  }

  // Transcript sets whose question set was ingested too.
  std::vector<SetLabel> transcript_sets() const {
    auto sets = ingested_sets();
    std::vector<SetLabel> out;
    for (SetLabel t : kTranscriptSets) {
      if (std::count(sets.begin(), sets.end(), t) != 0 &&
          std::count(sets.begin(), sets.end(), question_set_for(t)) != 0) {
        out.push_back(t);
      }
    }
    return out;
  }

  static std::string corpus_name(SetLabel l) { return "corpus." + to_string(l) + ".json"; }
  static std::string artifact(std::string_view kind, SetLabel l, std::string_view ext) {
    return std::string(kind) + "." + to_string(l) + "." + std::string(ext);
  }

  LemmaDictionary dictionary() const {
    const auto* e = project_.entry("dictionary.csv");
    if (e == nullptr) {
      throw Error(ErrorCode::kDependency, "no dictionary yet; run first: vocab");
    }
    return LemmaDictionary::from_csv(project_.load_artifact("dictionary.csv", true),
                                     e->dict_version);
  }

  // Manual edit of one dictionary key. Bumps the version when the entry
  // changes and leaves every stage after vocab stale.
  DictionaryEditResult edit_dictionary(std::string_view key, std::string_view lemma,
                                       std::optional<std::uint64_t> expected_version = {},
                                       const LemmaDictionary::Clock& clock = utc_timestamp) {
    const auto* e = project_.entry("dictionary.csv");
    if (e == nullptr) throw Error(ErrorCode::kDependency, "no dictionary yet; run first: vocab");
    const ManifestEntry old = *e;
    if (expected_version && *expected_version != old.dict_version) {
      throw Error(ErrorCode::kConflict, "dictionary is at version " +
                                            std::to_string(old.dict_version) + ", not " +
                                            std::to_string(*expected_version));
    }
    auto dict = LemmaDictionary::from_csv(project_.load_artifact("dictionary.csv", true),
                                          old.dict_version);
    if (!dict.set(key, lemma, Provenance::kManual, {}, clock)) {
      return {false, old.dict_version};
    }
    auto saved = project_.save_artifact("dictionary.csv", dict.to_csv(), old.stage, old.inputs,
                                        dict.version());
    // Keep vocab fresh: the marker now records the edited dictionary.
    if (const auto* m = project_.entry(marker(Stage::kVocab))) {
      const ManifestEntry marker_entry = *m;
      auto outputs = recorded_outputs(Stage::kVocab);
      outputs["dictionary.csv"] = saved.sha256;
      std::string listing;
      for (const auto& [name, hash] : outputs) listing += name + "\t" + hash + "\n";
      project_.save_artifact(marker(Stage::kVocab), listing, marker_entry.stage,
                             marker_entry.inputs, dict.version());
    }
    if (project_.read_log("dictionary_edits.csv").empty()) {
      project_.append_log("dictionary_edits.csv", "timestamp,key,old_lemma,new_lemma,provenance,version");
    }
    const auto& edit = dict.edit_log().back();
    std::string row = csv::row({edit.timestamp, edit.key, edit.old_lemma, edit.new_lemma,
                                to_string(edit.provenance), std::to_string(dict.version())});
    project_.append_log("dictionary_edits.csv", row);
    return {true, dict.version()};
  }

  ReviewState review_state() const {
    if (!project_.has("review_state.csv")) return {};
    return ReviewState::from_csv(project_.load_artifact("review_state.csv", true));
  }

  void save_review_state(const ReviewState& state) {
    project_.save_artifact("review_state.csv", state.to_csv(), "review");
  }

  Corpus load_corpus(SetLabel l, bool allow_stale = true) const {
    return corpus_from_json(project_.load_artifact(corpus_name(l), allow_stale));
  }

  std::vector<CodedSegment> load_segments(SetLabel t, bool allow_stale = true) const {
    return segments_from_csv(project_.load_artifact(artifact("segments", t, "csv"), allow_stale));
  }

 private:
  struct Output {
    std::string name;
    std::string content;
    std::uint64_t dict_version = 0;
  };

  std::string load(const std::string& name) {
    std::string content = project_.load_artifact(name);
    inputs_[name] = project_.entry(name)->sha256;
    return content;
  }

  void use_external(const std::string& key) {
    auto h = project_.current_hash(key);
    inputs_[key] = h ? *h : "absent";
  }

  void emit(std::string name, std::string content) {
    outputs_.push_back({std::move(name), std::move(content), dict_version_});
  }

  void load_dictionary_version() {
    const auto* e = project_.entry("dictionary.csv");
    dict_version_ = e == nullptr ? 0 : e->dict_version;
  }

  Corpus corpus(SetLabel l) { return corpus_from_json(load(corpus_name(l))); }

  TermDocumentMatrix matrix(SetLabel l) {
    return TermDocumentMatrix::from_csv(l, load(artifact("tdm", l, "csv")));
  }

  // --- stages ---------------------------------------------------------------

  void ingest() {
    dict_version_ = 0;
    const auto root = project_.root();
    use_external("source:contractions");
    ContractionTable table = ContractionTable::bundled();
    if (std::filesystem::is_regular_file(root / "inputs/contractions.csv")) {
      table = ContractionTable::from_csv(read_file(root / "inputs/contractions.csv"));
    }
    std::map<std::string, std::string> owner;  // transcript document id -> set
    std::set<SetLabel> present;
    for (SetLabel l : kAllSets) {
      use_external("source:" + to_string(l));
      auto files = list_text_files(root / "inputs" / to_string(l));
      if (files.empty()) {
        warn(&diag_, "set '" + to_string(l) + "' has no input files; skipped");
        continue;
      }
      Corpus c = ingest_documents(files, l, table, &diag_, root);
      if (l == SetLabel::kTraining || l == SetLabel::kTesting) {
        for (const auto& d : c.documents) {
          auto [it, fresh] = owner.emplace(d.id, to_string(l));
          if (!fresh) {
            throw Error(ErrorCode::kConflict, "document id '" + d.id + "' occurs in both '" +
                                                  it->second + "' and '" + to_string(l) + "'");
          }
        }
      }
      present.insert(l);
      emit(corpus_name(l), corpus_to_json(c));
    }
    bool usable = false;
    for (SetLabel t : kTranscriptSets) {
      usable = usable || (present.count(t) != 0 && present.count(question_set_for(t)) != 0);
    }
    if (!usable) {
      throw Error(ErrorCode::kIngestion,
                  "no transcript set with a matching question set under inputs/");
    }
  }

  void vocab() {
    std::vector<Corpus> corpora;
    for (SetLabel l : ingested_sets()) corpora.push_back(corpus(l));
    std::vector<const Corpus*> ptrs;
    for (const auto& c : corpora) ptrs.push_back(&c);
    auto draft = extract_vocabulary(ptrs, &diag_);
    LemmaDictionary dict = std::move(draft.dictionary);
    std::uint64_t version = 1;
    if (const auto* old = project_.entry("dictionary.csv")) {
      auto previous = LemmaDictionary::from_csv(project_.load_artifact("dictionary.csv", true),
                                                old->dict_version);
      for (const auto& e : previous.entries()) {
        if (e.provenance == Provenance::kManual) dict.insert_draft(e);
      }
      version = old->dict_version + (sha256_hex(dict.to_csv()) == old->sha256 ? 0 : 1);
    }
    dict_version_ = version;
    emit("dictionary.csv", dict.to_csv());
    emit("vocab_groups.csv", draft_groups_csv(draft.groups));
  }

  void lemmatise() {
    load(std::string("dictionary.csv"));
    load_dictionary_version();
    auto dict = dictionary();
    for (SetLabel l : ingested_sets()) {
      Corpus c = corpus(l);
      UnigramStream all;
      for (const auto& d : c.documents) {
        auto s = apply_lemmatization(d, dict);
        all.items.insert(all.items.end(), s.items.begin(), s.items.end());
      }
      emit(artifact("stream", l, "csv"), stream_to_csv(all));
    }
  }

  std::vector<StopwordList> stopword_lists() {
    use_external("stopwords");
    std::vector<StopwordList> lists;
    for (const auto& path : list_text_files(project_.root() / "inputs/stopwords")) {
      lists.push_back(StopwordList::from_text(path.stem().string(), read_file(path)));
    }
    if (lists.empty()) warn(&diag_, "no stopword lists under inputs/stopwords");
    return lists;
  }

  void tdm() {
    load_dictionary_version();
    auto lists = stopword_lists();
    for (SetLabel l : ingested_sets()) {
      Corpus c = corpus(l);
      auto stream = stream_from_csv(load(artifact("stream", l, "csv")));
      auto kept = remove_stopwords(stream, lists).stream;
      std::map<std::string, UnigramStream> by_doc;
      for (const auto& item : kept.items) by_doc[item.document_id].items.push_back(item);
      std::vector<std::pair<std::string, UnigramStream>> units;
      for (const auto& d : c.documents) units.emplace_back(d.id, by_doc[d.id]);
      auto m = tdm_from_streams(l, units);
      if (m.empty()) warn(&diag_, "set '" + to_string(l) + "': matrix has no rows");
      emit(artifact("tokens", l, "csv"), stream_to_csv(kept));
      emit(artifact("tdm", l, "csv"), m.to_csv());
    }
  }

  void filter() {
    load_dictionary_version();
    use_external("param:filter");
    for (SetLabel l : ingested_sets()) {
      auto m = matrix(l);
      ImportantUnigramSet set;
      set.set_label = l;
      set.low_cut = config_.low_pct;
      set.high_cut = config_.high_pct;
      set.mode = config_.percentile_mode;
      if (m.empty()) {
        warn(&diag_, "set '" + to_string(l) + "': nothing to filter");
      } else {
        set = filter_percentile(m, config_.low_pct, config_.high_pct, config_.percentile_mode);
      }
      emit(artifact("important", l, "csv"), set.to_csv());
    }
  }

  void categories() {
    load_dictionary_version();
    use_external("param:categories");
    for (SetLabel t : transcript_sets()) {
      auto q = matrix(question_set_for(t));
      auto cats = derive_categories(q, config_.low_pct, config_.high_pct,
                                    config_.percentile_mode, &diag_);
      emit(artifact("categories", t, "csv"), categories_to_csv(cats));
    }
  }

  void search() {
    load_dictionary_version();
    use_external("param:search");
    load(std::string("dictionary.csv"));
    auto dict = dictionary();
    for (SetLabel t : transcript_sets()) {
      Corpus c = corpus(t);
      auto m = matrix(t);
      auto important = ImportantUnigramSet::from_csv(t, load(artifact("important", t, "csv")));
      auto cats = categories_from_csv(load(artifact("categories", t, "csv")));
      auto result = iterative_code_search(c, dict, m, important, cats, config_.search_params(),
                                          &diag_);
      attach_transitional_codes(cats, result.transitional_codes);
      emit(artifact("search_trace", t, "csv"), result.trace.to_csv());
      emit(artifact("transitional_codes", t, "csv"),
           transitional_codes_to_csv(result.transitional_codes));
      emit(artifact("codebook", t, "csv"), codebook_to_csv(result.codebook));
      emit(artifact("category_codes", t, "csv"), categories_to_csv(cats));
      emit(artifact("outliers", t, "csv"),
           outliers_to_csv(flag_outlier_categories(cats, config_.outlier_ratio)));
    }
  }

  WordLists word_lists() {
    use_external("wordlists");
    const auto dir = project_.root() / "inputs/wordlists";
    if (list_text_files(dir).empty()) return WordLists::bundled();
    return WordLists::load(dir);
  }

  void annotate() {
    load_dictionary_version();
    auto lists = word_lists();
    for (SetLabel t : transcript_sets()) {
      Corpus c = corpus(t);
      auto book = codebook_from_csv(load(artifact("codebook", t, "csv")));
      auto segments = annotate_sentences(c, book);
      auto content = annotate_content_words(c, lists);
      attach_polarity(segments, content);
      emit(artifact("segments", t, "csv"), segments_to_csv(segments));
      emit(artifact("content_words", t, "csv"), segments_to_csv(content));
    }
    if (!project_.has("review_state.csv")) save_review_state({});
  }

  void relations() {
    load_dictionary_version();
    use_external("param:relations");
    auto state = ReviewState::from_csv(load(std::string("review_state.csv")));
    for (SetLabel t : transcript_sets()) {
      auto segments = segments_from_csv(load(artifact("segments", t, "csv")));
      state.apply(segments);
      std::vector<std::string> names;
      for (const auto& c : categories_from_csv(load(artifact("categories", t, "csv")))) {
        names.push_back(c.lemma);
      }
      emit(artifact("relations", t, "csv"),
           relation_stats(segments, names, config_.proximity_window).to_csv());
    }
  }

  void graph() {
    load_dictionary_version();
    use_external("param:graph");
    for (SetLabel t : transcript_sets()) {
      auto cats = categories_from_csv(load(artifact("categories", t, "csv")));
      auto tcs = transitional_codes_from_csv(load(artifact("transitional_codes", t, "csv")));
      auto important = ImportantUnigramSet::from_csv(t, load(artifact("important", t, "csv")));
      auto tokens = stream_from_csv(load(artifact("tokens", t, "csv")));
      auto segments = segments_from_csv(load(artifact("segments", t, "csv")));
      std::map<std::string, VertexRole> roles;
      for (const auto& tc : tcs) roles[tc.lemma] = VertexRole::kTransitionalCode;
      for (const auto& c : cats) roles[c.lemma] = VertexRole::kCategory;

      TermDocumentMatrix units = config_.cooccurrence_granularity == Granularity::kDocument
                                     ? matrix(t)
                                     : sentence_matrix(t, tokens);
      std::vector<std::string> selected;
      for (const auto& [lemma, role] : roles) {
        if (units.row_of(lemma)) selected.push_back(lemma);
      }
      emit(artifact("graph", t, "graphml"), to_graphml(graph_of(units, selected, roles)));

      // Units are the coded sentences; vertices are the important unigrams in them.
      std::set<std::pair<std::string, std::size_t>> coded;
      for (const auto& s : segments) coded.insert({s.document_id, s.sentence});
      std::map<std::pair<std::string, std::size_t>, UnigramStream> by_unit;
      for (const auto& item : tokens.items) {
        std::pair<std::string, std::size_t> key{item.document_id, item.sentence};
        if (coded.count(key) != 0 && important.contains(item.lemma)) {
          by_unit[key].items.push_back(item);
        }
      }
      std::vector<std::pair<std::string, UnigramStream>> unit_list;
      for (auto& [key, stream] : by_unit) {
        unit_list.emplace_back(key.first + "#" + std::to_string(key.second), std::move(stream));
      }
      auto seg_matrix = tdm_from_streams(t, unit_list);
      emit(artifact("graph_segments", t, "graphml"),
           to_graphml(graph_of(seg_matrix, seg_matrix.unigrams(), roles)));
    }
  }

  TermDocumentMatrix sentence_matrix(SetLabel t, const UnigramStream& tokens) {
    std::map<std::string, UnigramStream> by_doc;
    for (const auto& item : tokens.items) by_doc[item.document_id].items.push_back(item);
    std::vector<std::pair<std::string, UnigramStream>> streams(by_doc.begin(), by_doc.end());
    return build_sentence_tdm(t, streams);
  }

  UnigramGraph graph_of(const TermDocumentMatrix& m, const std::vector<std::string>& vertices,
                        const std::map<std::string, VertexRole>& roles) {
    if (vertices.empty()) {
      warn(&diag_, "set '" + to_string(m.set_label()) + "': graph has no vertices");
      return {};
    }
    return cooccurrence_graph(binarize(m, vertices), roles);
  }

  void cluster() {
    load_dictionary_version();
    use_external("param:cluster");
    for (SetLabel t : transcript_sets()) {
      for (const std::string kind : {"graph", "graph_segments"}) {
        auto g = from_graphml(load(artifact(kind, t, "graphml")));
        GirvanNewmanResult r;
        if (!g.empty()) r = girvan_newman(g, config_.min_cluster_size, &diag_);
        const std::string suffix = kind == "graph" ? "" : "_segments";
        emit(artifact("partition" + suffix, t, "csv"), partition_to_csv(r.partition));
        emit(artifact("gn_trace" + suffix, t, "csv"), r.trace_csv());
      }
    }
  }

  void significance() {
    load_dictionary_version();
    use_external("param:significance");
    for (SetLabel t : transcript_sets()) {
      std::string fits = "graph,distinct_degrees,slope,intercept,r_squared\n";
      for (const std::string kind : {"graph", "graph_segments"}) {
        const std::string suffix = kind == "graph" ? "" : "_segments";
        auto g = from_graphml(load(artifact(kind, t, "graphml")));
        auto p = partition_from_csv(load(artifact("partition" + suffix, t, "csv")));
        std::vector<ModuleReport> reports;
        if (!g.empty()) reports = module_significance(g, p, config_.alpha, &diag_);
        emit(artifact("modules" + suffix, t, "csv"), module_reports_to_csv(reports));
        auto fit = degree_distribution_fit(g);
        if (fit) {
          fits += csv::row({kind, std::to_string(fit->histogram.size()),
                            text::format_double(fit->fit.slope),
                            text::format_double(fit->fit.intercept),
                            fit->fit.r_squared ? text::format_double(*fit->fit.r_squared) : "n/a"});
        } else {
          fits += csv::row({kind, "0", "n/a", "n/a", "n/a"});
        }
      }
      emit(artifact("degree_fit", t, "csv"), fits);
    }
  }

  void report() {
    load_dictionary_version();
    use_external("param:report");
    use_external("validated");
    nlohmann::json summary;
    summary["dictionary_version"] = dict_version_;
    summary["config"] = nlohmann::json::object();
    for (const auto& k : PipelineConfig::keys()) summary["config"][k] = config_.get(k);

    for (SetLabel l : ingested_sets()) {
      auto m = matrix(l);
      const std::string name = artifact("report.frequencies", l, "csv");
      emit(name, frequencies_to_csv(m, report_frequencies(m)));
      summary["frequency_tables"].push_back(name);
    }

    auto state = ReviewState::from_csv(load(std::string("review_state.csv")));
    std::vector<CodedSegment> automatic;
    std::vector<CodedSegment> validated;
    std::set<std::string> matched_reviews;
    for (SetLabel t : transcript_sets()) {
      nlohmann::json set;
      const std::string label = to_string(t);
      set["search_trace"] = nlohmann::json::array();
      auto trace_rows = csv::parse(load(artifact("search_trace", t, "csv")));
      for (std::size_t i = 1; i < trace_rows.size(); ++i) {
        set["search_trace"].push_back({{"threshold", trace_rows[i][0]},
                                       {"transitional_codes", trace_rows[i][1]},
                                       {"coverage", trace_rows[i][2]}});
      }
      if (trace_rows.size() > 1) set["final_threshold"] = trace_rows.back()[0];
      auto cats = categories_from_csv(load(artifact("category_codes", t, "csv")));
      for (const auto& c : cats) set["categories"][c.lemma] = c.transitional_codes;
      auto outlier_rows = csv::parse(load(artifact("outliers", t, "csv")));
      set["outlier_categories"] = nlohmann::json::array();
      for (std::size_t i = 1; i < outlier_rows.size(); ++i) {
        if (outlier_rows[i][2] == "1") set["outlier_categories"].push_back(outlier_rows[i][0]);
      }

      auto segments = segments_from_csv(load(artifact("segments", t, "csv")));
      automatic.insert(automatic.end(), segments.begin(), segments.end());
      auto reviewed = segments;
      state.apply(reviewed);
      for (const auto& s : segments) {
        if (state.entries.count(s.key()) != 0) matched_reviews.insert(s.key());
      }
      std::map<std::string, std::size_t> by_status;
      for (const auto& s : reviewed) {
        ++by_status[to_string(s.status)];
        if (s.status == ReviewStatus::kAccepted || s.status == ReviewStatus::kReassigned) {
          validated.push_back(s);
        }
      }
      set["segments"] = {{"total", segments.size()}, {"by_status", by_status}};

      auto relation_rows = csv::parse(load(artifact("relations", t, "csv")));
      set["relations"] = nlohmann::json::array();
      for (std::size_t i = 1; i < relation_rows.size(); ++i) {
        const auto& r = relation_rows[i];
        set["relations"].push_back({{"a", r[0]}, {"b", r[1]}, {"inclusion", std::stoll(r[2])},
                                    {"proximity", std::stoll(r[3])}});
      }

      for (const std::string kind : {"graph", "graph_segments"}) {
        const std::string suffix = kind == "graph" ? "" : "_segments";
        auto g = from_graphml(load(artifact(kind, t, "graphml")));
        auto p = partition_from_csv(load(artifact("partition" + suffix, t, "csv")));
        emit(artifact("report." + kind, t, "graphml"), to_graphml(g, &p));
        emit(artifact("report." + kind, t, "dot"), to_dot(g, &p));
        nlohmann::json gj;
        gj["vertices"] = g.size();
        gj["edges"] = g.edge_count();
        gj["modules"] = p.modules;
        gj["eliminated"] = p.eliminated;
        gj["modularity"] = text::format_double(p.modularity);
        gj["module_reports"] = nlohmann::json::array();
        auto module_rows = csv::parse(load(artifact("modules" + suffix, t, "csv")));
        for (std::size_t i = 1; i < module_rows.size(); ++i) {
          const auto& r = module_rows[i];
          gj["module_reports"].push_back({{"module", std::stoll(r[0])},
                                          {"statistic", r[4]},
                                          {"p_value", r[5]},
                                          {"method", r[6]},
                                          {"verdict", r[7]}});
        }
        set[kind] = gj;
        if (kind == "graph_segments") {
          if (g.find(config_.ego_focus)) {
            auto view = ego_subgraph(g, config_.ego_focus, config_.ego_extras, p, &diag_);
            for (GraphFormat f : {GraphFormat::kGraphml, GraphFormat::kDot, GraphFormat::kCsv}) {
              emit("report.ego." + label + extension(f), export_graph(view, f));
            }
            set["ego"] = {{"focus", view.focus},
                          {"extras", view.extras},
                          {"nodes", view.nodes.size()},
                          {"edges", view.edges.size()}};
          } else {
            warn(&diag_, "set '" + label + "': ego focus '" + config_.ego_focus +
                             "' not in segment graph; view skipped");
          }
        }
      }
      auto fit_rows = csv::parse(load(artifact("degree_fit", t, "csv")));
      for (std::size_t i = 1; i < fit_rows.size(); ++i) {
        set["degree_fit"][fit_rows[i][0]] = {{"distinct_degrees", fit_rows[i][1]},
                                             {"r_squared", fit_rows[i][4]}};
      }
      summary["sets"][label] = set;
    }

    const auto validated_path = project_.root() / "inputs/validated_segments.csv";
    if (std::filesystem::is_regular_file(validated_path)) {
      auto imported = segments_from_csv(read_file(validated_path));
      validated.insert(validated.end(), imported.begin(), imported.end());
    }
    std::sort(validated.begin(), validated.end(), [](const CodedSegment& a, const CodedSegment& b) {
      return std::tie(a.document_id, a.span) < std::tie(b.document_id, b.span);
    });
    validated.erase(std::unique(validated.begin(), validated.end(),
                                [](const CodedSegment& a, const CodedSegment& b) {
                                  return a.document_id == b.document_id && a.span == b.span;
                                }),
                    validated.end());
    auto conc = concordance(automatic, validated);
    if (conc.fraction) {
      summary["concordance"] = {{"applicable", true},
                                {"retrieved", conc.retrieved},
                                {"validated", conc.validated},
                                {"fraction", text::format_fixed(*conc.fraction, 4)}};
    } else {
      summary["concordance"] = {{"applicable", false}, {"reason", "no validated segments"}};
    }
    std::vector<std::string> orphans;
    for (const auto& [key, entry] : state.entries) {
      if (matched_reviews.count(key) == 0) orphans.push_back(key);
    }
    summary["orphaned_reviews"] = orphans;
    emit("report.json", summary.dump(2) + "\n");
  }

  Project& project_;
  PipelineConfig config_;
  Diagnostics diag_;
  std::map<std::string, std::string> inputs_;
  std::vector<Output> outputs_;
  std::uint64_t dict_version_ = 0;
};

// Reads <root>/qdakit.conf when present, else the defaults.
inline PipelineConfig load_config(const std::filesystem::path& root) {
  const auto path = root / std::string(kConfigFile);
  if (!std::filesystem::is_regular_file(path)) return {};
  return PipelineConfig::from_text(read_file(path));
}

}  // namespace qdakit
