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

// Document ingestion, contraction expansion and paragraph/sentence
// segmentation.

#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qdakit/error.hpp"
#include "qdakit/resources.hpp"
#include "qdakit/text.hpp"

namespace qdakit {

// Transcript sets plus the two interview-question sets they are coded
// against.
enum class SetLabel { kTraining, kTesting, kTrainingQuestions, kTestingQuestions };

inline constexpr std::array<SetLabel, 4> kAllSets = {
    SetLabel::kTraining, SetLabel::kTesting, SetLabel::kTrainingQuestions,
    SetLabel::kTestingQuestions};

inline constexpr std::array<SetLabel, 2> kTranscriptSets = {
    SetLabel::kTraining, SetLabel::kTesting};

inline std::string to_string(SetLabel label) {
  switch (label) {
    case SetLabel::kTraining: return "training";
    case SetLabel::kTesting: return "testing";
    case SetLabel::kTrainingQuestions: return "training_questions";
    case SetLabel::kTestingQuestions: return "testing_questions";
  }
  return "unknown";
}

inline SetLabel parse_set_label(std::string_view s) {
  for (SetLabel label : kAllSets) {
    if (to_string(label) == s) return label;
  }
  throw Error(ErrorCode::kConfiguration,
              "unknown set label '" + std::string(s) + "'");
}

// The question set whose categories code a transcript set.
inline SetLabel question_set_for(SetLabel transcripts) {
  return transcripts == SetLabel::kTesting ? SetLabel::kTestingQuestions
                                           : SetLabel::kTrainingQuestions;
}

struct Document {
  std::string id;
  SetLabel set_label = SetLabel::kTraining;
  std::string source_path;
  std::string raw_text;
  std::string normalized_text;
  std::vector<Span> paragraphs;
  std::vector<Span> sentences;

  std::string_view sentence_text(std::size_t index) const {
    const Span& s = sentences.at(index);
    return std::string_view(normalized_text).substr(s.start, s.size());
  }

  // Index of the paragraph holding sentence `index`.
  std::size_t paragraph_of(std::size_t index) const {
    const Span& s = sentences.at(index);
    auto it = std::upper_bound(
        paragraphs.begin(), paragraphs.end(), s.start,
        [](std::size_t pos, const Span& p) { return pos < p.start; });
    return static_cast<std::size_t>(it - paragraphs.begin()) - 1;
  }

  // Sentence holding byte `pos`, if any.
  std::optional<std::size_t> sentence_at(std::size_t pos) const {
    auto it = std::upper_bound(
        sentences.begin(), sentences.end(), pos,
        [](std::size_t p, const Span& s) { return p < s.start; });
    if (it == sentences.begin()) return std::nullopt;
    --it;
    if (pos >= it->end) return std::nullopt;
    return static_cast<std::size_t>(it - sentences.begin());
  }
};

struct Corpus {
  SetLabel set_label = SetLabel::kTraining;
  std::vector<Document> documents;

  bool empty() const { return documents.empty(); }

  const Document* find(std::string_view id) const {
    for (const auto& d : documents) {
      if (d.id == id) return &d;
    }
    return nullptr;
  }
};

// Case-insensitive contraction lookup. Replacements never contain a key, so
// expansion is idempotent.
class ContractionTable {
 public:
  ContractionTable() = default;

  static ContractionTable bundled() {
    return from_csv(resources::kContractionsCsv);
  }

  // Two columns (contraction, longhand) with a header row.
  static ContractionTable from_csv(std::string_view content) {
    auto rows = csv::parse(content);
    if (rows.empty()) {
      throw Error(ErrorCode::kConfiguration,
                  "contraction table: header row required");
    }
    ContractionTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() != 2) {
        throw Error(ErrorCode::kConfiguration,
                    "contraction table line " + std::to_string(i + 1) +
                        ": expected 2 columns");
      }
      table.add(r[0], r[1]);
    }
    table.check_closure();
    return table;
  }

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

  const std::string* find(std::string_view folded) const {
    auto it = entries_.find(std::string(folded));
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool empty() const { return entries_.empty(); }

 private:
  void add(std::string_view key, std::string_view value) {
    std::string k = text::fold(text::trim(key));
    std::string v(text::trim(value));
    auto tokens = text::tokenize(k);
    if (k.empty() || tokens.size() != 1 || tokens[0].size() != k.size()) {
      throw Error(ErrorCode::kConfiguration,
                  "contraction table: key '" + std::string(key) +
                      "' is not a single word");
    }
    if (v.empty()) {
      throw Error(ErrorCode::kConfiguration,
                  "contraction table: empty longhand for '" + k + "'");
    }
    if (!entries_.emplace(k, v).second) {
      throw Error(ErrorCode::kConfiguration,
                  "contraction table: duplicate key '" + k + "'");
    }
  }

  void check_closure() const {
    for (const auto& [key, value] : entries_) {
      for (const Span& t : text::tokenize(value)) {
        std::string folded = text::fold(value.substr(t.start, t.size()));
        if (entries_.count(folded) != 0) {
          throw Error(ErrorCode::kConfiguration,
                      "contraction table: longhand of '" + key +
                          "' contains contraction '" + folded + "'");
        }
      }
    }
  }

  std::map<std::string, std::string> entries_;
};

namespace detail {

inline std::string apply_case(std::string_view surface,
                              const std::string& replacement) {
  std::size_t letters = 0;
  std::size_t upper = 0;
  for (char c : surface) {
    auto u = static_cast<unsigned char>(c);
    if ((u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z')) {
      ++letters;
      if (text::is_upper(u)) ++upper;
    }
  }
  std::string out = replacement;
  if (letters >= 2 && upper == letters) {
    for (char& c : out) c = text::to_upper(c);
  } else if (!surface.empty() &&
             text::is_upper(static_cast<unsigned char>(surface[0])) &&
             !out.empty()) {
    out[0] = text::to_upper(out[0]);
  }
  return out;
}

}  // namespace detail

// Replaces every contraction with its longhand. Case follows the surface
// form: ALL-CAPS stays all caps, a leading capital is kept.
inline std::string normalize_text(std::string_view raw,
                                  const ContractionTable& table) {
  std::string out;
  out.reserve(raw.size() + raw.size() / 8);
  std::size_t last = 0;
  for (const Span& t : text::tokenize(raw)) {
    std::string_view surface = raw.substr(t.start, t.size());
    const std::string* longhand = table.find(text::fold(surface));
    if (longhand == nullptr) continue;
    out.append(raw.substr(last, t.start - last));
    out += detail::apply_case(surface, *longhand);
    last = t.end;
  }
  out.append(raw.substr(last));
  return out;
}

struct Segmentation {
  std::vector<Span> paragraphs;
  std::vector<Span> sentences;
};

namespace detail {

inline bool is_closer(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']';
}

inline bool is_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0) {
    char c = text[b - 1];
    if (text::is_ascii_alnum(static_cast<unsigned char>(c)) || c == '.') {
      --b;
    } else {
      break;
    }
  }
  std::string word = text::lower(text.substr(b, dot - b));
  if (word.empty()) return false;
  if (word.size() == 1 && word[0] >= 'a' && word[0] <= 'z' && word != "i") {
    return true;  // initials such as "J. Smith"
  }
  for (std::string_view abbr : resources::kAbbreviations) {
    if (word == abbr) return true;
  }
  return false;
}

// True if a sentence may start at `pos`: an uppercase letter, a digit or an
// opening quote.
inline bool opens_sentence(std::string_view text, std::size_t pos) {
  auto c = static_cast<unsigned char>(text[pos]);
  if (text::is_upper(c) || (c >= '0' && c <= '9') || c == '"' || c == '\'' ||
      c == '(') {
    return true;
  }
  // U+201C / U+2018 opening quotes
  return text.substr(pos, 3) == "\xE2\x80\x9C" ||
         text.substr(pos, 3) == "\xE2\x80\x98";
}

inline void push_trimmed(std::string_view text, std::size_t b, std::size_t e,
                         std::vector<Span>& out) {
  while (b < e && text::is_space(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && text::is_space(static_cast<unsigned char>(text[e - 1]))) --e;
  if (b < e) out.push_back({b, e});
}

inline void split_sentences(std::string_view text, Span paragraph,
                            std::vector<Span>& out) {
  std::size_t begin = paragraph.start;
  std::size_t i = paragraph.start;
  while (i < paragraph.end) {
    char c = text[i];
    if (c != '.' && c != '?' && c != '!') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < paragraph.end &&
           (text[j] == '.' || text[j] == '?' || text[j] == '!')) {
      ++j;
    }
    bool single_period = c == '.' && j == i + 1;
    while (j < paragraph.end) {
      if (is_closer(text[j])) {
        ++j;
      } else if (text.substr(j, 3) == "\xE2\x80\x9D" ||
                 text.substr(j, 3) == "\xE2\x80\x99") {
        j += 3;
      } else {
        break;
      }
    }
    if (j >= paragraph.end) break;
    std::size_t k = j;
    while (k < paragraph.end && text::is_space(static_cast<unsigned char>(text[k]))) {
      ++k;
    }
    bool boundary = k > j && k < paragraph.end && opens_sentence(text, k);
    if (boundary && single_period && is_abbreviation(text, i)) boundary = false;
    if (boundary) {
      push_trimmed(text, begin, j, out);
      begin = k;
    }
    i = k > j ? k : j;
  }
  push_trimmed(text, begin, paragraph.end, out);
}

}  // namespace detail

// Paragraphs are separated by blank lines. Sentences end at '.', '?' or '!'
// (plus closing quotes) followed by whitespace and an uppercase letter, digit
// or opening quote; a period after a protected abbreviation never ends one.
inline Segmentation segment(std::string_view text) {
  Segmentation seg;
  std::size_t line_start = 0;
  bool in_para = false;
  std::size_t para_start = 0;
  std::size_t para_end = 0;
  while (line_start <= text.size()) {
    std::size_t nl = text.find('\n', line_start);
    std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(line_start, line_end - line_start);
    if (text::whitespace_only(line)) {
      if (in_para) {
        detail::push_trimmed(text, para_start, para_end, seg.paragraphs);
        in_para = false;
      }
    } else {
      if (!in_para) {
        in_para = true;
        para_start = line_start;
      }
      para_end = line_end;
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  if (in_para) detail::push_trimmed(text, para_start, para_end, seg.paragraphs);
  for (const Span& p : seg.paragraphs) {
    detail::split_sentences(text, p, seg.sentences);
  }
  return seg;
}

inline Document make_document(std::string id, SetLabel label,
                              std::string raw_text,
                              const ContractionTable& table,
                              std::string source_path = {}) {
  Document doc;
  doc.id = std::move(id);
  doc.set_label = label;
  doc.source_path = std::move(source_path);
  doc.raw_text = std::move(raw_text);
  doc.normalized_text = normalize_text(doc.raw_text, table);
  Segmentation seg = segment(doc.normalized_text);
  doc.paragraphs = std::move(seg.paragraphs);
  doc.sentences = std::move(seg.sentences);
  return doc;
}

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3
                                   : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += len;
  }
  return true;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIngestion, "cannot read '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorCode::kIngestion, "error reading '" + path.string() + "'");
  }
  return ss.str();
}

inline constexpr std::string_view kUtf8Bom = "\xEF\xBB\xBF";

// One document per file, id = file stem, ordered by id. `path_base`, when
// set, makes recorded source paths relative to it.
inline Corpus ingest_documents(const std::vector<std::filesystem::path>& paths,
                               SetLabel label, const ContractionTable& table,
                               Diagnostics* diag = nullptr,
                               const std::filesystem::path& path_base = {}) {
  Corpus corpus;
  corpus.set_label = label;
  if (paths.empty()) {
    warn(diag, "no documents given for set '" + to_string(label) + "'");
    return corpus;
  }
  std::set<std::string> seen;
  for (const auto& path : paths) {
    if (!std::filesystem::is_regular_file(path)) {
      throw Error(ErrorCode::kIngestion,
                  "cannot read '" + path.string() + "': not a regular file");
    }
    std::string raw = read_file(path);
    if (std::string_view(raw).substr(0, 3) == kUtf8Bom) raw.erase(0, 3);
    if (!valid_utf8(raw)) {
      throw Error(ErrorCode::kIngestion,
                  "'" + path.string() + "' is not valid UTF-8");
    }
    std::string id = path.stem().string();
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kConflict, "duplicate document id '" + id +
                                            "' (from '" + path.string() + "')");
    }
    std::string source = path_base.empty()
                             ? path.generic_string()
                             : path.lexically_relative(path_base).generic_string();
    corpus.documents.push_back(
        make_document(std::move(id), label, std::move(raw), table, source));
  }
  std::sort(corpus.documents.begin(), corpus.documents.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  return corpus;
}

// All *.txt files directly inside `dir`, sorted.
inline std::vector<std::filesystem::path> list_text_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline nlohmann::json spans_to_json(const std::vector<Span>& spans) {
  auto arr = nlohmann::json::array();
  for (const Span& s : spans) arr.push_back({s.start, s.end});
  return arr;
}

inline std::vector<Span> spans_from_json(const nlohmann::json& j) {
  std::vector<Span> out;
  for (const auto& item : j) {
    out.push_back({item.at(0).get<std::size_t>(), item.at(1).get<std::size_t>()});
  }
  return out;
}

inline std::string corpus_to_json(const Corpus& corpus) {
  nlohmann::json j;
  j["set_label"] = to_string(corpus.set_label);
  j["documents"] = nlohmann::json::array();
  for (const auto& d : corpus.documents) {
    j["documents"].push_back({{"id", d.id},
                              {"source_path", d.source_path},
                              {"raw_text", d.raw_text},
                              {"normalized_text", d.normalized_text},
                              {"paragraphs", spans_to_json(d.paragraphs)},
                              {"sentences", spans_to_json(d.sentences)}});
  }
  return j.dump(1) + "\n";
}

inline Corpus corpus_from_json(std::string_view content) {
  auto j = nlohmann::json::parse(content);
  Corpus corpus;
  corpus.set_label = parse_set_label(j.at("set_label").get<std::string>());
  for (const auto& d : j.at("documents")) {
    Document doc;
    doc.id = d.at("id").get<std::string>();
    doc.set_label = corpus.set_label;
    doc.source_path = d.at("source_path").get<std::string>();
    doc.raw_text = d.at("raw_text").get<std::string>();
    doc.normalized_text = d.at("normalized_text").get<std::string>();
    doc.paragraphs = spans_from_json(d.at("paragraphs"));
    doc.sentences = spans_from_json(d.at("sentences"));
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace qdakit
