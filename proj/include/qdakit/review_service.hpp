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

// JSON-over-HTTP facade for segment review, dictionary edits and recompute.
//
// ReviewService holds the logic and returns JSON values; ReviewServer mounts
// it on a loopback HTTP listener. Reads share a lock, mutations take it
// exclusively. Mutations may carry the version the client last saw
// (expected_revision for segments, expected_version for the dictionary);
// a mismatch is a conflict.
//
// Error body: {"error": {"code": "<code>", "message": "...", "details": {...}}}

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "qdakit/pipeline.hpp"

namespace qdakit {

using nlohmann::json;

// An Error with a structured payload for the response body.
class ServiceError : public Error {
 public:
  ServiceError(ErrorCode code, const std::string& message, json details)
      : Error(code, message), details_(std::move(details)) {}
  const json& details() const { return details_; }

 private:
  json details_;
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
    case ErrorCode::kLookup: return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kStale:
    case ErrorCode::kDependency: return 409;
    case ErrorCode::kValidation: return 422;
    case ErrorCode::kConfiguration: return 400;
    default: return 500;
  }
}

inline json error_body(const Error& e) {
  json body = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (const auto* se = dynamic_cast<const ServiceError*>(&e)) body["details"] = se->details();
  return {{"error", body}};
}

struct SegmentFilter {
  std::optional<SetLabel> set;
  std::optional<ReviewStatus> status;
  std::optional<std::string> category;
  std::optional<std::string> document;
  std::optional<std::string> polarity;  // a polarity field with a nonzero count, or "any"
  std::size_t page = 1;
  std::size_t page_size = 50;
};

inline constexpr std::size_t kMaxPageSize = 500;
inline constexpr std::size_t kContextParagraphs = 2;

struct ReviewAction {
  std::string segment;
  std::string action;  // accept | reject | reassign
  std::vector<std::string> categories;
  std::string note;
  std::optional<std::uint64_t> expected_revision;
};

inline json polarity_to_json(const Polarity& p) {
  return {{"yes", p.yes},
          {"no", p.no},
          {"negation", p.negation},
          {"amplifier", p.amplifier},
          {"deamplifier", p.deamplifier},
          {"positive", p.positive},
          {"negative", p.negative},
          {"yes_capitalized", p.yes_capitalized},
          {"no_capitalized", p.no_capitalized}};
}

inline int polarity_field(const Polarity& p, std::string_view name) {
  if (name == "yes") return p.yes;
  if (name == "no") return p.no;
  if (name == "negation") return p.negation;
  if (name == "amplifier") return p.amplifier;
  if (name == "deamplifier") return p.deamplifier;
  if (name == "positive") return p.positive;
  if (name == "negative") return p.negative;
  if (name == "any") return p.any() ? 1 : 0;
  throw Error(ErrorCode::kValidation, "unknown polarity filter '" + std::string(name) + "'");
}

class ReviewService {
 public:
  using Clock = std::function<std::string()>;

  ReviewService(Project project, PipelineConfig config, Clock clock = utc_timestamp)
      : project_(std::move(project)),
        pipeline_(project_, std::move(config)),
        clock_(std::move(clock)) {}

  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  Pipeline& pipeline() { return pipeline_; }

  json status() const {
    std::shared_lock lock(mutex_);
    json out = json::object();
    for (Stage s : kStageOrder) out[to_string(s)] = to_string(pipeline_.state(s));
    return {{"stages", out}};
  }

  json list_segments(const SegmentFilter& filter) const {
    if (filter.page < 1) throw Error(ErrorCode::kValidation, "page starts at 1");
    if (filter.page_size < 1 || filter.page_size > kMaxPageSize) {
      throw Error(ErrorCode::kValidation,
                  "page_size must lie in [1, " + std::to_string(kMaxPageSize) + "]");
    }
    if (filter.polarity) polarity_field(Polarity{}, *filter.polarity);
    std::shared_lock lock(mutex_);
    require_fresh(Stage::kAnnotate);
    const ReviewState state = pipeline_.review_state();
    std::vector<Row> rows = reviewed_rows(state);
    std::vector<const Row*> hits;
    for (const auto& r : rows) {
      const CodedSegment& s = r.segment;
      if (filter.set && r.set != *filter.set) continue;
      if (filter.status && s.status != *filter.status) continue;
      if (filter.document && s.document_id != *filter.document) continue;
      if (filter.category &&
          std::find(s.categories.begin(), s.categories.end(), *filter.category) ==
              s.categories.end()) {
        continue;
      }
      if (filter.polarity && polarity_field(s.polarity, *filter.polarity) == 0) continue;
      hits.push_back(&r);
    }
    const std::size_t total = hits.size();
    const std::size_t pages = (total + filter.page_size - 1) / filter.page_size;
    json items = json::array();
    std::map<SetLabel, Corpus> corpora;
    std::map<SetLabel, std::set<std::string>> outliers;
    for (std::size_t i = (filter.page - 1) * filter.page_size;
         i < total && i < filter.page * filter.page_size; ++i) {
      const Row& r = *hits[i];
      if (corpora.count(r.set) == 0) {
        corpora[r.set] = pipeline_.load_corpus(r.set);
        outliers[r.set] = outlier_categories(r.set);
      }
      items.push_back(segment_json(r, &corpora[r.set], outliers[r.set]));
    }
    std::vector<std::string> orphans;
    for (const auto& [key, e] : state.entries) {
      bool found = std::any_of(rows.begin(), rows.end(),
                               [&](const Row& r) { return r.segment.key() == key; });
      if (!found) orphans.push_back(key);
    }
    return {{"page", filter.page},  {"page_size", filter.page_size}, {"total", total},
            {"pages", pages},       {"segments", items},             {"orphaned", orphans}};
  }

  json get_segment(std::string_view id) const {
    std::shared_lock lock(mutex_);
    require_fresh(Stage::kAnnotate);
    const ReviewState state = pipeline_.review_state();
    for (const auto& r : reviewed_rows(state)) {
      if (r.segment.key() == id) {
        Corpus c = pipeline_.load_corpus(r.set);
        return segment_json(r, &c, outlier_categories(r.set));
      }
    }
    throw Error(ErrorCode::kNotFound, "no segment '" + std::string(id) + "'");
  }

  json apply_action(const ReviewAction& action) {
    ReviewStatus next;
    if (action.action == "accept") {
      next = ReviewStatus::kAccepted;
    } else if (action.action == "reject") {
      next = ReviewStatus::kRejected;
    } else if (action.action == "reassign") {
      next = ReviewStatus::kReassigned;
      if (action.categories.empty()) {
        throw Error(ErrorCode::kValidation, "reassign needs at least one category");
      }
    } else {
      throw Error(ErrorCode::kValidation, "unknown action '" + action.action + "'");
    }
    std::unique_lock lock(mutex_);
    require_fresh(Stage::kAnnotate);
    ReviewState state = pipeline_.review_state();
    auto rows = reviewed_rows(state);
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const Row& r) { return r.segment.key() == action.segment; });
    if (it == rows.end()) throw Error(ErrorCode::kNotFound, "no segment '" + action.segment + "'");
    ReviewEntry& entry = state.entries[action.segment];
    if (action.expected_revision && *action.expected_revision != entry.revision) {
      throw ServiceError(ErrorCode::kConflict,
                         "segment '" + action.segment + "' is at revision " +
                             std::to_string(entry.revision),
                         {{"revision", entry.revision}});
    }
    const ReviewStatus previous = entry.status;
    entry.status = next;
    std::vector<std::string> cats = action.categories;
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    entry.categories = next == ReviewStatus::kReassigned ? cats : std::vector<std::string>{};
    ++entry.revision;
    pipeline_.save_review_state(state);
    json log = {{"timestamp", clock_()},
                {"segment", action.segment},
                {"action", action.action},
                {"previous_status", to_string(previous)},
                {"status", to_string(next)},
                {"categories", entry.categories},
                {"note", action.note},
                {"revision", entry.revision}};
    project_.append_log("review_actions.jsonl", log.dump());
    Row updated = *it;
    updated.segment.status = next;
    updated.revision = entry.revision;
    if (next == ReviewStatus::kReassigned) updated.segment.categories = entry.categories;
    Corpus c = pipeline_.load_corpus(updated.set);
    return segment_json(updated, &c, outlier_categories(updated.set));
  }

  json dictionary() const {
    std::shared_lock lock(mutex_);
    auto dict = pipeline_.dictionary();
    json entries = json::array();
    for (const auto& e : dict.entries()) entries.push_back(entry_json(e));
    return {{"version", dict.version()}, {"entries", entries}};
  }

  json get_dictionary(std::string_view raw_key) const {
    const std::string key = canonical_key(raw_key);
    std::shared_lock lock(mutex_);
    auto dict = pipeline_.dictionary();
    const LemmaEntry* e = dict.find(key);
    if (e == nullptr) throw Error(ErrorCode::kNotFound, "no dictionary key '" + key + "'");
    json out = entry_json(*e);
    out["version"] = dict.version();
    return out;
  }

  json put_dictionary(std::string_view raw_key, std::string_view lemma,
                      std::optional<std::uint64_t> expected_version) {
    const std::string key = canonical_key(raw_key);
    validate_lemma(lemma);
    std::unique_lock lock(mutex_);
    auto result = pipeline_.edit_dictionary(key, lemma, expected_version, clock_);
    json stale = json::array();
    for (Stage s : kStageOrder) {
      if (pipeline_.state(s) == StageState::kStale) stale.push_back(to_string(s));
    }
    return {{"key", key},
            {"lemma", std::string(lemma)},
            {"version", result.version},
            {"changed", result.changed},
            {"stale_stages", stale}};
  }

  // Runs the stage and whatever it needs that is not fresh; "all" runs the
  // whole pipeline. Fresh stages are skipped unless forced.
  json recompute(std::string_view target, bool force = false) {
    std::vector<Stage> stages;
    if (target != "all") {
      const Stage s = parse_stage(target);
      std::set<Stage> closure{s};
      std::vector<Stage> stack{s};
      while (!stack.empty()) {
        Stage d = stack.back();
        stack.pop_back();
        for (Stage dd : stage_dependencies(d)) {
          if (closure.insert(dd).second) stack.push_back(dd);
        }
      }
      stages.assign(closure.begin(), closure.end());
    }
    std::unique_lock lock(mutex_);
    json outcomes = json::array();
    for (const auto& o : pipeline_.run(stages, false)) outcomes.push_back(o.to_json());
    if (force && target != "all") {
      outcomes.push_back(pipeline_.run_stage(parse_stage(target), true).to_json());
    }
    return {{"outcomes", outcomes}};
  }

  // name: "<kind>.<set>" with kind graph, graph_segments or ego. Formats:
  // json (default), graphml, dot, csv. Returns the body and its media type.
  std::pair<std::string, std::string> graph(std::string_view name, std::string_view format,
                                            std::optional<std::string> focus = {},
                                            std::optional<std::vector<std::string>> extras = {})
      const {
    auto dot = name.rfind('.');
    if (dot == std::string_view::npos) {
      throw Error(ErrorCode::kNotFound, "graph name must be <kind>.<set>");
    }
    const std::string kind(name.substr(0, dot));
    const SetLabel set = parse_set(name.substr(dot + 1));
    if (kind != "graph" && kind != "graph_segments" && kind != "ego") {
      throw Error(ErrorCode::kNotFound, "unknown graph kind '" + kind + "'");
    }
    std::shared_lock lock(mutex_);
    const std::string source = kind == "graph" ? "graph" : "graph_segments";
    const std::string suffix = source == "graph" ? "" : "_segments";
    auto g = from_graphml(load(Pipeline::artifact(source, set, "graphml")));
    auto p = partition_from_csv(load(Pipeline::artifact("partition" + suffix, set, "csv")));
    if (kind == "ego") {
      const auto& cfg = pipeline_.config();
      auto view = ego_subgraph(g, focus.value_or(cfg.ego_focus), extras.value_or(cfg.ego_extras),
                               p);
      if (format == "json") return {view_json(view).dump(2), "application/json"};
      return {export_graph(view, parse_graph_format(format)), media_type(format)};
    }
    if (format == "json") return {graph_json(g, p).dump(2), "application/json"};
    return {export_graph(g, parse_graph_format(format), &p), media_type(format)};
  }

  json frequencies(std::string_view set_name) const {
    const SetLabel set = parse_set(set_name);
    std::shared_lock lock(mutex_);
    auto m = TermDocumentMatrix::from_csv(set, load(Pipeline::artifact("tdm", set, "csv")));
    const double total = static_cast<double>(m.total());
    json rows = json::array();
    for (const auto& r : report_frequencies(m)) {
      rows.push_back({{"lemma", r.lemma},
                      {"total", r.total},
                      {"relative", total > 0 ? static_cast<double>(r.total) / total : 0.0},
                      {"per_document", r.per_document}});
    }
    return {{"set", to_string(set)}, {"documents", m.documents()}, {"total", m.total()},
            {"rows", rows}};
  }

 private:
  struct Row {
    SetLabel set;
    CodedSegment segment;
    std::uint64_t revision = 0;
  };

  static SetLabel parse_set(std::string_view s) {
    try {
      return parse_set_label(s);
    } catch (const Error&) {
      throw Error(ErrorCode::kNotFound, "unknown set '" + std::string(s) + "'");
    }
  }

  static std::string media_type(std::string_view format) {
    if (format == "graphml") return "application/xml";
    if (format == "dot") return "text/vnd.graphviz";
    return "text/csv";
  }

  std::string load(const std::string& artifact) const {
    try {
      return project_.load_artifact(artifact);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kStale) {
        throw ServiceError(ErrorCode::kStale, e.what(),
                           {{"artifact", artifact},
                            {"stale_inputs", project_.stale_inputs(artifact)}});
      }
      throw;
    }
  }

  void require_fresh(Stage s) const {
    if (pipeline_.state(s) == StageState::kFresh) return;
    std::vector<std::string> stale;
    for (Stage b : pipeline_.blocking_upstream(s)) stale.push_back(to_string(b));
    stale.push_back(to_string(s));
    throw ServiceError(ErrorCode::kStale,
                       "stage '" + to_string(s) + "' is not fresh; recompute first",
                       {{"stale_stages", stale}});
  }

  std::vector<Row> reviewed_rows(const ReviewState& state) const {
    std::vector<Row> rows;
    for (SetLabel t : pipeline_.transcript_sets()) {
      auto segments = pipeline_.load_segments(t);
      state.apply(segments);
      for (auto& s : segments) {
        auto it = state.entries.find(s.key());
        rows.push_back({t, std::move(s), it == state.entries.end() ? 0 : it->second.revision});
      }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return std::tie(a.segment.document_id, a.segment.sentence) <
             std::tie(b.segment.document_id, b.segment.sentence);
    });
    return rows;
  }

  std::set<std::string> outlier_categories(SetLabel t) const {
    std::set<std::string> out;
    const std::string name = Pipeline::artifact("outliers", t, "csv");
    if (!project_.has(name)) return out;
    auto rows = csv::parse(project_.load_artifact(name, true));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() == 3 && rows[i][2] == "1") out.insert(rows[i][0]);
    }
    return out;
  }

  static json segment_json(const Row& r, const Corpus* corpus,
                           const std::set<std::string>& outliers) {
    const CodedSegment& s = r.segment;
    json codes = json::array();
    for (const auto& m : s.matches) {
      codes.push_back({{"surface", m.code.surface},
                       {"parent", m.code.parent},
                       {"start", m.span.start},
                       {"end", m.span.end}});
    }
    json flags = json::array();
    for (const auto& c : s.categories) {
      if (outliers.count(c) != 0) flags.push_back("outlier_category:" + c);
    }
    json out = {{"id", s.key()},
                {"set", to_string(r.set)},
                {"document", s.document_id},
                {"sentence", s.sentence},
                {"start", s.span.start},
                {"end", s.span.end},
                {"codes", codes},
                {"categories", s.categories},
                {"status", to_string(s.status)},
                {"revision", r.revision},
                {"polarity", polarity_to_json(s.polarity)},
                {"flags", flags}};
    json context = json::array();
    const Document* doc = corpus == nullptr ? nullptr : corpus->find(s.document_id);
    if (doc != nullptr && s.sentence < doc->sentences.size()) {
      out["text"] = std::string(doc->sentence_text(s.sentence));
      const std::size_t p = doc->paragraph_of(s.sentence);
      const std::size_t first = p >= kContextParagraphs ? p - kContextParagraphs : 0;
      const std::size_t last = std::min(p + kContextParagraphs, doc->paragraphs.size() - 1);
      for (std::size_t i = first; i <= last; ++i) {
        const Span& sp = doc->paragraphs[i];
        context.push_back({{"paragraph", i},
                           {"contains_segment", i == p},
                           {"text", doc->normalized_text.substr(sp.start, sp.size())}});
      }
    }
    out["context"] = context;
    return out;
  }

  static json entry_json(const LemmaEntry& e) {
    return {{"key", e.key},
            {"lemma", e.lemma},
            {"pos_hint", e.pos_hint},
            {"provenance", to_string(e.provenance)}};
  }

  static json graph_json(const UnigramGraph& g, const Partition& p) {
    const double total = static_cast<double>(g.total_weight());
    json vertices = json::array();
    for (std::size_t v : detail::sorted_vertices(g)) {
      auto m = p.module_of(g.label(v));
      vertices.push_back({{"id", g.label(v)},
                          {"role", to_string(g.role(v))},
                          {"module", m ? json(*m) : json(nullptr)},
                          {"degree", g.degree(v)},
                          {"strength", g.strength(v)},
                          {"relative_degree", detail::relative_degree(g, v)}});
    }
    json edges = json::array();
    for (const auto& e : detail::sorted_edges(g)) {
      edges.push_back({{"source", e.a},
                       {"target", e.b},
                       {"weight", e.weight},
                       {"relative_weight", total > 0 ? static_cast<double>(e.weight) / total : 0.0}});
    }
    return {{"vertices", vertices},
            {"edges", edges},
            {"modules", p.modules},
            {"eliminated", p.eliminated},
            {"modularity", p.modularity}};
  }

  static json view_json(const SubgraphView& view) {
    json nodes = json::array();
    for (const auto& n : view.nodes) {
      nodes.push_back({{"id", n.id},
                       {"supervertex", n.supervertex},
                       {"members", n.members},
                       {"module", n.module ? json(*n.module) : json(nullptr)},
                       {"role", to_string(n.role)},
                       {"degree", n.degree},
                       {"relative_degree", n.relative_degree}});
    }
    json edges = json::array();
    for (const auto& e : view.edges) {
      edges.push_back({{"source", e.a},
                       {"target", e.b},
                       {"weight", e.weight},
                       {"relative_weight", e.relative_weight}});
    }
    return {{"focus", view.focus}, {"extras", view.extras}, {"nodes", nodes}, {"edges", edges}};
  }

  mutable std::shared_mutex mutex_;
  Project project_;
  Pipeline pipeline_;
  Clock clock_;
};

// Loopback HTTP listener over a ReviewService.
class ReviewServer {
 public:
  explicit ReviewServer(ReviewService& service, std::string host = "127.0.0.1")
      : service_(service), host_(std::move(host)) {
    routes();
  }

  ~ReviewServer() { stop(); }

  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  int start(int port = 0) {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host_);
    } else {
      port_ = server_.bind_to_port(host_, port) ? port : -1;
    }
    if (port_ < 0) {
      throw Error(ErrorCode::kStorage, "cannot bind " + host_ + ":" + std::to_string(port));
    }
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Binds and serves on the calling thread until stop().
  void run(int port) {
    if (!server_.bind_to_port(host_, port)) {
      throw Error(ErrorCode::kStorage, "cannot bind " + host_ + ":" + std::to_string(port));
    }
    port_ = port;
    server_.listen_after_bind();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static void send(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
  }

  static Handler guarded(Handler h) {
    return [h](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send(res, error_body(e), http_status(e.code()));
      } catch (const json::exception& e) {
        send(res, error_body(Error(ErrorCode::kValidation, std::string("bad JSON: ") + e.what())),
             422);
      } catch (const std::exception& e) {
        send(res, error_body(Error(ErrorCode::kStorage, e.what())), 500);
      }
    };
  }

  static std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
  }

  static std::size_t count_param(const httplib::Request& req, const char* name,
                                 std::size_t fallback) {
    auto v = param(req, name);
    if (!v) return fallback;
    long long n;
    try {
      n = text::parse_int(*v, name);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, e.what());
    }
    if (n < 0) throw Error(ErrorCode::kValidation, std::string(name) + " must be >= 0");
    return static_cast<std::size_t>(n);
  }

  static json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::kValidation, "request body must be a JSON object");
    return j;
  }

  static std::optional<std::uint64_t> version_field(const json& body, const char* name) {
    if (!body.contains(name) || body[name].is_null()) return std::nullopt;
    if (!body[name].is_number_unsigned()) {
      throw Error(ErrorCode::kValidation, std::string(name) + " must be a non-negative integer");
    }
    return body[name].get<std::uint64_t>();
  }

  void routes() {
    server_.Get("/status", guarded([this](const auto&, auto& res) { send(res, service_.status()); }));

    server_.Get("/segments", guarded([this](const httplib::Request& req, httplib::Response& res) {
      SegmentFilter f;
      if (auto v = param(req, "set")) f.set = parse_set_label(*v);
      if (auto v = param(req, "status")) f.status = parse_review_status(*v);
      f.category = param(req, "category");
      f.document = param(req, "document");
      f.polarity = param(req, "polarity");
      f.page = count_param(req, "page", 1);
      f.page_size = count_param(req, "page_size", 50);
      send(res, service_.list_segments(f));
    }));

    server_.Get(R"(/segments/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  send(res, service_.get_segment(req.matches[1].str()));
                }));

    server_.Post(R"(/segments/([^/]+)/action)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                   json body = body_of(req);
                   ReviewAction a;
                   a.segment = req.matches[1].str();
                   a.action = body.value("action", "");
                   if (body.contains("categories")) {
                     a.categories = body["categories"].get<std::vector<std::string>>();
                   }
                   a.note = body.value("note", "");
                   a.expected_revision = version_field(body, "expected_revision");
                   send(res, service_.apply_action(a));
                 }));

    server_.Get("/dictionary", guarded([this](const auto&, auto& res) {
                  send(res, service_.dictionary());
                }));

    server_.Get(R"(/dictionary/(.+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  send(res, service_.get_dictionary(req.matches[1].str()));
                }));

    server_.Put(R"(/dictionary/(.+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  json body = body_of(req);
                  if (!body.contains("lemma") || !body["lemma"].is_string()) {
                    throw Error(ErrorCode::kValidation, "body needs a string 'lemma'");
                  }
                  send(res, service_.put_dictionary(req.matches[1].str(),
                                                    body["lemma"].get<std::string>(),
                                                    version_field(body, "expected_version")));
                }));

    server_.Post(R"(/recompute/([^/]+))",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                   json body = body_of(req);
                   send(res, service_.recompute(req.matches[1].str(), body.value("force", false)));
                 }));

    server_.Get(R"(/graphs/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  std::optional<std::vector<std::string>> extras;
                  if (auto v = param(req, "extras")) {
                    extras.emplace();
                    for (const auto& e : text::split(*v, ',')) {
                      if (!e.empty()) extras->push_back(e);
                    }
                  }
                  auto [content, type] = service_.graph(
                      req.matches[1].str(), param(req, "format").value_or("json"),
                      param(req, "focus"), extras);
                  res.status = 200;
                  res.set_content(content, type);
                }));

    server_.Get(R"(/frequencies/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  send(res, service_.frequencies(req.matches[1].str()));
                }));
  }

  ReviewService& service_;
  std::string host_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace qdakit
