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

// Term-document matrices: construction from lemma streams, the importance
// filter, binarisation and frequency reports.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qdakit/corpus.hpp"
#include "qdakit/error.hpp"
#include "qdakit/lexicon.hpp"
#include "qdakit/stats.hpp"
#include "qdakit/text.hpp"

namespace qdakit {

// Counts of lemmas (rows, lexicographic) per unit (columns). Units are
// documents, or sentences for sentence-granularity co-occurrence.
class TermDocumentMatrix {
 public:
  TermDocumentMatrix() = default;
  TermDocumentMatrix(SetLabel label, std::vector<std::string> unigrams,
                     std::vector<std::string> documents,
                     std::vector<std::uint32_t> counts)
      : set_label_(label),
        unigrams_(std::move(unigrams)),
        documents_(std::move(documents)),
        counts_(std::move(counts)) {
    if (counts_.size() != unigrams_.size() * documents_.size()) {
      throw Error(ErrorCode::kValidation, "matrix: counts do not match shape");
    }
    for (std::size_t i = 0; i < unigrams_.size(); ++i) {
      index_[unigrams_[i]] = i;
    }
  }

  SetLabel set_label() const { return set_label_; }
  const std::vector<std::string>& unigrams() const { return unigrams_; }
  const std::vector<std::string>& documents() const { return documents_; }
  std::size_t rows() const { return unigrams_.size(); }
  std::size_t cols() const { return documents_.size(); }
  bool empty() const { return unigrams_.empty(); }

  std::uint32_t at(std::size_t row, std::size_t col) const {
    return counts_[row * documents_.size() + col];
  }

  std::optional<std::size_t> row_of(std::string_view lemma) const {
    auto it = index_.find(std::string(lemma));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<double> row_values(std::size_t row) const {
    std::vector<double> out(cols());
    for (std::size_t j = 0; j < cols(); ++j) out[j] = at(row, j);
    return out;
  }

  std::uint64_t row_total(std::size_t row) const {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < cols(); ++j) total += at(row, j);
    return total;
  }

  std::size_t document_frequency(std::size_t row) const {
    std::size_t df = 0;
    for (std::size_t j = 0; j < cols(); ++j) df += at(row, j) > 0 ? 1 : 0;
    return df;
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  // Header row = unit ids, first column = lemma.
  std::string to_csv() const {
    std::vector<std::string> header{"lemma"};
    header.insert(header.end(), documents_.begin(), documents_.end());
    std::string out = csv::row(header);
    for (std::size_t i = 0; i < rows(); ++i) {
      std::vector<std::string> r{unigrams_[i]};
      for (std::size_t j = 0; j < cols(); ++j) r.push_back(std::to_string(at(i, j)));
      out += csv::row(r);
    }
    return out;
  }

  static TermDocumentMatrix from_csv(SetLabel label, std::string_view content) {
    auto rows = csv::parse(content);
    if (rows.empty() || rows[0].empty() || rows[0][0] != "lemma") {
      throw Error(ErrorCode::kValidation, "matrix CSV: header row required");
    }
    std::vector<std::string> docs(rows[0].begin() + 1, rows[0].end());
    std::vector<std::string> lemmas;
    std::vector<std::uint32_t> counts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != docs.size() + 1) {
        throw Error(ErrorCode::kValidation, "matrix CSV: ragged row");
      }
      lemmas.push_back(rows[i][0]);
      for (std::size_t j = 1; j < rows[i].size(); ++j) {
        counts.push_back(static_cast<std::uint32_t>(text::parse_int(rows[i][j], "count")));
      }
    }
    return TermDocumentMatrix(label, std::move(lemmas), std::move(docs),
                              std::move(counts));
  }

  friend bool operator==(const TermDocumentMatrix& a, const TermDocumentMatrix& b) {
    return a.set_label_ == b.set_label_ && a.unigrams_ == b.unigrams_ &&
           a.documents_ == b.documents_ && a.counts_ == b.counts_;
  }

 private:
  SetLabel set_label_ = SetLabel::kTraining;
  std::vector<std::string> unigrams_;
  std::vector<std::string> documents_;
  std::vector<std::uint32_t> counts_;
  std::map<std::string, std::size_t> index_;
};

// Builds a matrix from (unit id, stream) pairs. Lemmas absent from every
// unit never get a row.
inline TermDocumentMatrix tdm_from_streams(
    SetLabel label, const std::vector<std::pair<std::string, UnigramStream>>& units) {
  std::map<std::string, std::vector<std::uint32_t>> rows;
  for (std::size_t j = 0; j < units.size(); ++j) {
    for (const auto& item : units[j].second.items) {
      auto& row = rows[item.lemma];
      if (row.empty()) row.assign(units.size(), 0);
      ++row[j];
    }
  }
  std::vector<std::string> lemmas;
  std::vector<std::uint32_t> counts;
  for (auto& [lemma, row] : rows) {
    lemmas.push_back(lemma);
    counts.insert(counts.end(), row.begin(), row.end());
  }
  std::vector<std::string> ids;
  for (const auto& u : units) ids.push_back(u.first);
  return TermDocumentMatrix(label, std::move(lemmas), std::move(ids),
                            std::move(counts));
}

// Lemmatised, stopword-filtered stream of each document in corpus order.
inline std::vector<std::pair<std::string, UnigramStream>> filtered_streams(
    const Corpus& corpus, const LemmaDictionary& dict,
    const std::vector<StopwordList>& stop) {
  std::vector<std::pair<std::string, UnigramStream>> out;
  for (const auto& doc : corpus.documents) {
    out.emplace_back(doc.id,
                     remove_stopwords(apply_lemmatization(doc, dict), stop).stream);
  }
  return out;
}

inline TermDocumentMatrix build_tdm(const Corpus& corpus, const LemmaDictionary& dict,
                                    const std::vector<StopwordList>& stop,
                                    Diagnostics* diag = nullptr) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "no documents in set '" + to_string(corpus.set_label) + "'");
  }
  auto tdm = tdm_from_streams(corpus.set_label, filtered_streams(corpus, dict, stop));
  if (tdm.empty()) {
    warn(diag, "set '" + to_string(corpus.set_label) +
                   "': every token was removed; matrix has no rows");
  }
  return tdm;
}

// Sentence units: one column per (document, sentence) that keeps at least
// one item, id "<document>#<sentence>".
inline TermDocumentMatrix build_sentence_tdm(
    SetLabel label, const std::vector<std::pair<std::string, UnigramStream>>& streams) {
  std::vector<std::pair<std::string, UnigramStream>> units;
  for (const auto& [doc, stream] : streams) {
    std::map<std::size_t, UnigramStream> by_sentence;
    for (const auto& item : stream.items) by_sentence[item.sentence].items.push_back(item);
    for (auto& [s, st] : by_sentence) {
      units.emplace_back(doc + "#" + std::to_string(s), std::move(st));
    }
  }
  return tdm_from_streams(label, units);
}

enum class PercentileMode { kTotals, kDocFrequency };

inline std::string to_string(PercentileMode m) {
  return m == PercentileMode::kTotals ? "totals" : "doc_frequency";
}

inline PercentileMode parse_percentile_mode(std::string_view s) {
  if (s == "totals") return PercentileMode::kTotals;
  if (s == "doc_frequency") return PercentileMode::kDocFrequency;
  throw Error(ErrorCode::kConfiguration,
              "unknown percentile mode '" + std::string(s) + "'");
}

struct ImportantUnigramSet {
  SetLabel set_label = SetLabel::kTraining;
  std::vector<std::string> unigrams;  // matrix row order
  double low_cut = 1;
  double high_cut = 99;
  PercentileMode mode = PercentileMode::kTotals;

  bool contains(std::string_view lemma) const {
    return std::binary_search(unigrams.begin(), unigrams.end(), lemma);
  }

  std::string to_csv() const {
    std::string out = "# set=" + to_string(set_label) +
                      " low=" + text::format_double(low_cut) +
                      " high=" + text::format_double(high_cut) +
                      " mode=" + to_string(mode) + "\nlemma\n";
    for (const auto& u : unigrams) out += csv::row({u});
    return out;
  }

  static ImportantUnigramSet from_csv(SetLabel label, std::string_view content) {
    ImportantUnigramSet set;
    set.set_label = label;
    auto lines = text::split_lines(content);
    if (lines.size() < 2 || lines[0].rfind("# set=", 0) != 0) {
      throw Error(ErrorCode::kValidation, "important-unigram CSV: bad header");
    }
    for (const auto& part : text::split(lines[0].substr(2), ' ')) {
      auto eq = part.find('=');
      if (eq == std::string::npos) continue;
      std::string k = part.substr(0, eq), v = part.substr(eq + 1);
      if (k == "low") set.low_cut = text::parse_double(v, "low");
      if (k == "high") set.high_cut = text::parse_double(v, "high");
      if (k == "mode") set.mode = parse_percentile_mode(v);
    }
    auto rows = csv::parse(content.substr(content.find('\n') + 1));
    for (std::size_t i = 1; i < rows.size(); ++i) set.unigrams.push_back(rows[i].at(0));
    return set;
  }
};

inline void check_cuts(double low, double high) {
  if (!(low >= 0 && high <= 100 && low < high)) {
    throw Error(ErrorCode::kConfiguration,
                "percentile cuts must satisfy 0 <= low < high <= 100 (got " +
                    text::format_double(low) + ", " + text::format_double(high) +
                    ")");
  }
}

// Totals mode: a unigram is discarded when its total occurrence falls
// strictly outside [lower, upper]. `upper` is the nearest-rank high-th
// percentile of the totals; `lower` is the same rule applied to the mirrored
// distribution, i.e. the value at ascending rank n + 1 - ceil((100-low)/100 n).
// With totals 1..100 and cuts 1/99 this keeps 2..99; cuts 0/100 keep all.
//
// Doc-frequency mode: discarded when the share of units containing the
// unigram is below low% or above high%.
inline ImportantUnigramSet filter_percentile(const TermDocumentMatrix& tdm,
                                             double low, double high,
                                             PercentileMode mode = PercentileMode::kTotals) {
  check_cuts(low, high);
  if (tdm.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot filter an empty matrix");
  }
  ImportantUnigramSet set;
  set.set_label = tdm.set_label();
  set.low_cut = low;
  set.high_cut = high;
  set.mode = mode;
  const std::size_t n = tdm.rows();
  if (mode == PercentileMode::kTotals) {
    std::vector<double> totals(n);
    for (std::size_t i = 0; i < n; ++i) totals[i] = static_cast<double>(tdm.row_total(i));
    std::vector<double> sorted = totals;
    std::sort(sorted.begin(), sorted.end());
    const double upper = sorted[stats::nearest_rank(high, n) - 1];
    const double lower = sorted[n - stats::nearest_rank(100.0 - low, n)];
    for (std::size_t i = 0; i < n; ++i) {
      if (totals[i] >= lower && totals[i] <= upper) set.unigrams.push_back(tdm.unigrams()[i]);
    }
  } else {
    const double units = static_cast<double>(tdm.cols());
    for (std::size_t i = 0; i < n; ++i) {
      const double share = 100.0 * static_cast<double>(tdm.document_frequency(i)) / units;
      if (share >= low && share <= high) set.unigrams.push_back(tdm.unigrams()[i]);
    }
  }
  return set;
}

// Presence/absence over a subset of rows.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(SetLabel label, std::vector<std::string> unigrams,
               std::vector<std::string> units, std::vector<std::uint8_t> bits)
      : set_label_(label),
        unigrams_(std::move(unigrams)),
        units_(std::move(units)),
        bits_(std::move(bits)) {}

  SetLabel set_label() const { return set_label_; }
  const std::vector<std::string>& unigrams() const { return unigrams_; }
  const std::vector<std::string>& units() const { return units_; }
  std::size_t rows() const { return unigrams_.size(); }
  std::size_t cols() const { return units_.size(); }
  bool at(std::size_t r, std::size_t c) const { return bits_[r * units_.size() + c] != 0; }

  std::size_t row_count(std::size_t r) const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < cols(); ++c) n += at(r, c) ? 1 : 0;
    return n;
  }

 private:
  SetLabel set_label_ = SetLabel::kTraining;
  std::vector<std::string> unigrams_;
  std::vector<std::string> units_;
  std::vector<std::uint8_t> bits_;
};

inline BinaryMatrix binarize(const TermDocumentMatrix& tdm,
                             const std::vector<std::string>& selection) {
  std::vector<std::string> rows;
  std::vector<std::uint8_t> bits;
  for (const auto& lemma : selection) {
    auto r = tdm.row_of(lemma);
    if (!r) {
      throw Error(ErrorCode::kValidation,
                  "binarize: '" + lemma + "' is not a matrix row");
    }
    rows.push_back(lemma);
    for (std::size_t c = 0; c < tdm.cols(); ++c) bits.push_back(tdm.at(*r, c) > 0 ? 1 : 0);
  }
  return BinaryMatrix(tdm.set_label(), std::move(rows), tdm.documents(), std::move(bits));
}

inline BinaryMatrix binarize(const TermDocumentMatrix& tdm,
                             const ImportantUnigramSet& selection) {
  return binarize(tdm, selection.unigrams);
}

struct FrequencyRow {
  std::string lemma;
  std::uint64_t total = 0;
  std::vector<std::uint32_t> per_document;
};

// Descending by total, ties lexicographic.
inline std::vector<FrequencyRow> report_frequencies(const TermDocumentMatrix& tdm) {
  std::vector<FrequencyRow> out;
  for (std::size_t i = 0; i < tdm.rows(); ++i) {
    FrequencyRow row{tdm.unigrams()[i], tdm.row_total(i), {}};
    for (std::size_t j = 0; j < tdm.cols(); ++j) row.per_document.push_back(tdm.at(i, j));
    out.push_back(std::move(row));
  }
  std::sort(out.begin(), out.end(), [](const FrequencyRow& a, const FrequencyRow& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.lemma < b.lemma;
  });
  return out;
}

inline std::string frequencies_to_csv(const TermDocumentMatrix& tdm,
                                      const std::vector<FrequencyRow>& rows) {
  std::vector<std::string> header{"lemma", "total"};
  header.insert(header.end(), tdm.documents().begin(), tdm.documents().end());
  std::string out = csv::row(header);
  for (const auto& r : rows) {
    std::vector<std::string> f{r.lemma, std::to_string(r.total)};
    for (auto c : r.per_document) f.push_back(std::to_string(c));
    out += csv::row(f);
  }
  return out;
}

}  // namespace qdakit
