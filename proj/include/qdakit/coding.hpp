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

// Correlation-driven code discovery and whole-sentence auto-coding.
//
// Categories are the important unigrams of an interview-question set. A
// transitional code is an important transcript unigram whose per-document
// count row correlates with some category row at |r| >= threshold; its codes
// are the surface forms the dictionary maps onto it. Every sentence holding a
// code becomes one coded segment. The threshold search walks |r| down from
// 1.0 in fixed steps until coded sentences cover the target share of tokens.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdakit/corpus.hpp"
#include "qdakit/error.hpp"
#include "qdakit/lexicon.hpp"
#include "qdakit/matrix.hpp"
#include "qdakit/resources.hpp"
#include "qdakit/stats.hpp"
#include "qdakit/text.hpp"

namespace qdakit {

// Absolute slack when comparing |r| with a threshold, so that identical rows
// (r computed as 0.9999999999999998) pass at 1.0.
inline constexpr double kThresholdTolerance = 1e-9;

struct Category {
  std::string lemma;
  SetLabel source_set = SetLabel::kTrainingQuestions;
  std::vector<std::string> transitional_codes;
};

// Categories are the important unigrams of the question matrix, in
// lexicographic order.
inline std::vector<Category> derive_categories(const TermDocumentMatrix& question_tdm,
                                               double low, double high,
                                               PercentileMode mode = PercentileMode::kTotals,
                                               Diagnostics* diag = nullptr) {
  check_cuts(low, high);
  std::vector<Category> out;
  if (question_tdm.empty()) {
    warn(diag, "no categories derived: question matrix has no rows");
    return out;
  }
  auto important = filter_percentile(question_tdm, low, high, mode);
  for (const auto& u : important.unigrams) {
    out.push_back({u, question_tdm.set_label(), {}});
  }
  if (out.empty()) warn(diag, "no categories derived");
  return out;
}

struct Correlation {
  std::string category;
  double r = 0;
};

struct TransitionalCode {
  std::string lemma;
  std::vector<Correlation> correlations;  // qualifying pairs only
  double best_abs_r = 0;
};

// Every defined candidate/category correlation, computed once and reused by
// each threshold of the search.
struct CorrelationTable {
  std::vector<std::pair<std::string, std::vector<Correlation>>> candidates;
};

inline CorrelationTable compute_correlations(const TermDocumentMatrix& tdm,
                                             const ImportantUnigramSet& important,
                                             const std::vector<Category>& categories,
                                             Diagnostics* diag = nullptr) {
  std::set<std::string> category_lemmas;
  std::vector<std::pair<std::string, std::vector<double>>> category_rows;
  for (const auto& c : categories) {
    category_lemmas.insert(c.lemma);
    auto row = tdm.row_of(c.lemma);
    if (!row) {
      warn(diag, "category '" + c.lemma + "' does not occur in set '" +
                     to_string(tdm.set_label()) + "'; skipped");
      continue;
    }
    category_rows.emplace_back(c.lemma, tdm.row_values(*row));
  }
  CorrelationTable table;
  for (const auto& u : important.unigrams) {
    if (category_lemmas.count(u) != 0) continue;
    auto row = tdm.row_of(u);
    if (!row) continue;
    const auto values = tdm.row_values(*row);
    std::vector<Correlation> corr;
    for (const auto& [cat, cat_values] : category_rows) {
      try {
        corr.push_back({cat, stats::pearson(values, cat_values)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedVariance) throw;
        warn(diag, "correlation of '" + u + "' with '" + cat +
                       "' undefined (zero variance); pair skipped");
      }
    }
    table.candidates.emplace_back(u, std::move(corr));
  }
  return table;
}

inline void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kConfiguration,
                "correlation threshold must lie in (0, 1]");
  }
}

inline std::vector<TransitionalCode> select_transitional_codes(
    const CorrelationTable& table, double threshold) {
  check_threshold(threshold);
  std::vector<TransitionalCode> out;
  for (const auto& [lemma, corr] : table.candidates) {
    TransitionalCode tc;
    tc.lemma = lemma;
    for (const auto& c : corr) {
      if (std::abs(c.r) >= threshold - kThresholdTolerance) {
        tc.correlations.push_back(c);
        tc.best_abs_r = std::max(tc.best_abs_r, std::abs(c.r));
      }
    }
    if (!tc.correlations.empty()) out.push_back(std::move(tc));
  }
  return out;
}

// A unigram qualifies when it is important in the transcript set, is not a
// category itself, and |pearson(row(u), row(c))| >= threshold for at least
// one category c. It may attach to several categories.
inline std::vector<TransitionalCode> find_transitional_codes(
    const TermDocumentMatrix& tdm, const ImportantUnigramSet& important,
    const std::vector<Category>& categories, double threshold,
    Diagnostics* diag = nullptr) {
  check_threshold(threshold);
  return select_transitional_codes(
      compute_correlations(tdm, important, categories, diag), threshold);
}

inline void attach_transitional_codes(std::vector<Category>& categories,
                                      const std::vector<TransitionalCode>& codes) {
  for (auto& c : categories) {
    c.transitional_codes.clear();
    for (const auto& tc : codes) {
      for (const auto& corr : tc.correlations) {
        if (corr.category == c.lemma) {
          c.transitional_codes.push_back(tc.lemma);
          break;
        }
      }
    }
  }
}

struct Code {
  std::string surface;
  std::string parent;

  friend bool operator==(const Code&, const Code&) = default;
  friend auto operator<=>(const Code&, const Code&) = default;
};

// All dictionary keys whose lemma is the transitional code.
inline std::vector<Code> enumerate_codes(const TransitionalCode& tc,
                                         const LemmaDictionary& dict,
                                         Diagnostics* diag = nullptr) {
  std::vector<Code> out;
  for (auto& key : dict.keys_for(tc.lemma)) out.push_back({key, tc.lemma});
  if (out.empty()) {
    warn(diag, "transitional code '" + tc.lemma + "' has no dictionary entry");
  }
  return out;
}

// Codes plus the categories each parent belongs to.
struct Codebook {
  std::vector<Code> codes;
  std::map<std::string, std::vector<std::string>> categories_of;

  bool empty() const { return codes.empty(); }
};

inline Codebook build_codebook(const std::vector<TransitionalCode>& tcs,
                               const LemmaDictionary& dict,
                               Diagnostics* diag = nullptr) {
  Codebook book;
  for (const auto& tc : tcs) {
    auto codes = enumerate_codes(tc, dict, diag);
    book.codes.insert(book.codes.end(), codes.begin(), codes.end());
    auto& cats = book.categories_of[tc.lemma];
    for (const auto& c : tc.correlations) cats.push_back(c.category);
    std::sort(cats.begin(), cats.end());
  }
  std::sort(book.codes.begin(), book.codes.end());
  return book;
}

enum class ReviewStatus { kAuto, kAccepted, kRejected, kReassigned };

inline std::string to_string(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::kAuto: return "auto";
    case ReviewStatus::kAccepted: return "accepted";
    case ReviewStatus::kRejected: return "rejected";
    case ReviewStatus::kReassigned: return "reassigned";
  }
  return "auto";
}

inline ReviewStatus parse_review_status(std::string_view s) {
  if (s == "auto") return ReviewStatus::kAuto;
  if (s == "accepted") return ReviewStatus::kAccepted;
  if (s == "rejected") return ReviewStatus::kRejected;
  if (s == "reassigned") return ReviewStatus::kReassigned;
  throw Error(ErrorCode::kValidation, "unknown review status '" + std::string(s) + "'");
}

struct Polarity {
  int yes = 0;
  int no = 0;
  int negation = 0;
  int amplifier = 0;
  int deamplifier = 0;
  int positive = 0;
  int negative = 0;
  // How many of the yes/no hits were the capitalised form.
  int yes_capitalized = 0;
  int no_capitalized = 0;

  bool any() const {
    return yes + no + negation + amplifier + deamplifier + positive + negative > 0;
  }
  friend bool operator==(const Polarity&, const Polarity&) = default;
};

struct CodeMatch {
  Code code;
  Span span;

  friend bool operator==(const CodeMatch&, const CodeMatch&) = default;
};

struct CodedSegment {
  std::string document_id;
  std::size_t sentence = 0;
  Span span;  // always the full sentence span
  std::vector<CodeMatch> matches;
  std::vector<std::string> categories;
  ReviewStatus status = ReviewStatus::kAuto;
  Polarity polarity;

  std::string key() const { return document_id + ":" + std::to_string(sentence); }
  friend bool operator==(const CodedSegment&, const CodedSegment&) = default;
};

namespace detail {

struct DocTokens {
  std::vector<Span> spans;
  std::vector<std::string> folded;
  std::vector<std::optional<std::size_t>> sentence;
};

inline DocTokens doc_tokens(const Document& doc) {
  DocTokens t;
  std::string_view s = doc.normalized_text;
  t.spans = text::tokenize(s);
  for (const Span& sp : t.spans) {
    t.folded.push_back(text::fold(s.substr(sp.start, sp.size())));
    t.sentence.push_back(doc.sentence_at(sp.start));
  }
  return t;
}

}  // namespace detail

// One segment per sentence holding at least one whole-word, case-insensitive
// code match; all matches of a sentence collapse into its segment.
inline std::vector<CodedSegment> annotate_sentences(const Corpus& corpus,
                                                    const Codebook& book) {
  // first token -> (code tokens, code)
  std::map<std::string, std::vector<std::pair<std::vector<std::string>, const Code*>>> by_first;
  for (const auto& code : book.codes) {
    auto parts = text::split(code.surface, ' ');
    by_first[parts[0]].emplace_back(parts, &code);
  }
  std::vector<CodedSegment> out;
  for (const auto& doc : corpus.documents) {
    auto toks = detail::doc_tokens(doc);
    std::string_view s = doc.normalized_text;
    std::map<std::size_t, CodedSegment> by_sentence;
    for (std::size_t i = 0; i < toks.spans.size(); ++i) {
      if (!toks.sentence[i]) continue;
      auto it = by_first.find(toks.folded[i]);
      if (it == by_first.end()) continue;
      for (const auto& [parts, code] : it->second) {
        if (i + parts.size() > toks.spans.size()) continue;
        bool ok = true;
        for (std::size_t k = 1; k < parts.size() && ok; ++k) {
          const Span& prev = toks.spans[i + k - 1];
          const Span& cur = toks.spans[i + k];
          ok = toks.folded[i + k] == parts[k] && toks.sentence[i + k] == toks.sentence[i] &&
               text::whitespace_only(s.substr(prev.end, cur.start - prev.end));
        }
        if (!ok) continue;
        const std::size_t sent = *toks.sentence[i];
        auto& seg = by_sentence[sent];
        seg.document_id = doc.id;
        seg.sentence = sent;
        seg.span = doc.sentences[sent];
        seg.matches.push_back({*code, {toks.spans[i].start, toks.spans[i + parts.size() - 1].end}});
      }
    }
    for (auto& [sent, seg] : by_sentence) {
      std::sort(seg.matches.begin(), seg.matches.end(),
                [](const CodeMatch& a, const CodeMatch& b) {
                  return std::tie(a.span, a.code) < std::tie(b.span, b.code);
                });
      std::set<std::string> cats;
      for (const auto& m : seg.matches) {
        auto c = book.categories_of.find(m.code.parent);
        if (c != book.categories_of.end()) cats.insert(c->second.begin(), c->second.end());
      }
      seg.categories.assign(cats.begin(), cats.end());
      out.push_back(std::move(seg));
    }
  }
  return out;
}

// Share of all tokens of the corpus that lie inside coded sentences.
inline double coverage(const Corpus& corpus, const std::vector<CodedSegment>& segments) {
  std::map<std::string, std::set<std::size_t>> coded;
  for (const auto& seg : segments) coded[seg.document_id].insert(seg.sentence);
  std::size_t total = 0;
  std::size_t inside = 0;
  for (const auto& doc : corpus.documents) {
    auto spans = text::tokenize(doc.normalized_text);
    total += spans.size();
    auto it = coded.find(doc.id);
    if (it == coded.end()) continue;
    for (const Span& sp : spans) {
      auto sent = doc.sentence_at(sp.start);
      if (sent && it->second.count(*sent) != 0) ++inside;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(total);
}

struct SearchParams {
  double start = 1.0;
  double step = 0.05;
  double target = 0.5;
  double floor = 0.5;

  void validate() const {
    auto unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!unit(start) || !unit(target) || !unit(floor) || !(step > 0.0) || floor > start) {
      throw Error(ErrorCode::kConfiguration,
                  "search parameters: start, target, floor must lie in (0, 1], "
                  "step > 0 and floor <= start");
    }
  }
};

struct SearchStep {
  double threshold = 0;
  std::size_t transitional_codes = 0;
  double coverage = 0;
};

struct SearchTrace {
  std::vector<SearchStep> steps;
  double final_threshold = 0;
  bool reached_target = false;

  std::string to_csv() const {
    std::string out = "threshold,transitional_codes,coverage\n";
    for (const auto& s : steps) {
      out += csv::row({text::format_fixed(s.threshold, 4),
                       std::to_string(s.transitional_codes),
                       text::format_fixed(s.coverage, 6)});
    }
    return out;
  }
};

struct SearchResult {
  std::vector<CodedSegment> segments;
  std::vector<TransitionalCode> transitional_codes;
  Codebook codebook;
  SearchTrace trace;
};

// Thresholds start, start - step, ... down to floor. Stops at the first
// threshold whose coverage reaches the target; if the floor is reached first
// the floor's result is returned with a warning.
inline SearchResult iterative_code_search(const Corpus& corpus, const LemmaDictionary& dict,
                                          const TermDocumentMatrix& tdm,
                                          const ImportantUnigramSet& important,
                                          const std::vector<Category>& categories,
                                          const SearchParams& params = {},
                                          Diagnostics* diag = nullptr) {
  params.validate();
  auto table = compute_correlations(tdm, important, categories, diag);
  SearchResult result;
  for (std::size_t k = 0;; ++k) {
    const double threshold = params.start - static_cast<double>(k) * params.step;
    if (threshold < params.floor - kThresholdTolerance || threshold <= 0.0) break;
    auto tcs = select_transitional_codes(table, threshold);
    auto book = build_codebook(tcs, dict, nullptr);
    auto segments = annotate_sentences(corpus, book);
    const double cov = coverage(corpus, segments);
    result.trace.steps.push_back({threshold, tcs.size(), cov});
    result.trace.final_threshold = threshold;
    result.segments = std::move(segments);
    result.transitional_codes = std::move(tcs);
    result.codebook = std::move(book);
    if (cov >= params.target) {
      result.trace.reached_target = true;
      break;
    }
  }
  if (!result.trace.reached_target) {
    warn(diag, "coverage target " + text::format_fixed(params.target, 2) +
                   " not reached before floor " + text::format_fixed(params.floor, 2) +
                   "; keeping the floor result");
  }
  // Warnings about missing dictionary entries, once, for the final codes.
  build_codebook(result.transitional_codes, dict, diag);
  return result;
}

// Content-analysis word lists. yes/no forms match case-sensitively; the other
// lists match folded tokens.
struct WordLists {
  std::set<std::string> yes;
  std::set<std::string> no;
  std::set<std::string> negation;
  std::set<std::string> amplifier;
  std::set<std::string> deamplifier;
  std::set<std::string> positive;
  std::set<std::string> negative;

  static std::set<std::string> parse(std::string_view content, bool fold) {
    std::set<std::string> out;
    for (const auto& line : text::split_lines(content)) {
      std::string_view w = text::trim(line);
      if (w.empty() || w[0] == '#') continue;
      out.insert(fold ? text::fold(w) : std::string(w));
    }
    return out;
  }

  static WordLists bundled() {
    WordLists w;
    w.yes = parse(resources::kYesWords, false);
    w.no = parse(resources::kNoWords, false);
    w.negation = parse(resources::kNegationWords, true);
    w.amplifier = parse(resources::kAmplifierWords, true);
    w.deamplifier = parse(resources::kDeamplifierWords, true);
    w.positive = parse(resources::kPositiveWords, true);
    w.negative = parse(resources::kNegativeWords, true);
    return w;
  }

  // negation/amplifier/deamplifier/positive/negative.txt are required;
  // yes.txt and no.txt default to {yes, Yes} and {no, No}.
  static WordLists load(const std::filesystem::path& dir) {
    auto required = [&](const char* name) {
      auto path = dir / (std::string(name) + ".txt");
      if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::kConfiguration,
                    "missing word list '" + path.string() + "'");
      }
      return parse(read_file(path), true);
    };
    WordLists w = bundled();
    w.negation = required("negation");
    w.amplifier = required("amplifier");
    w.deamplifier = required("deamplifier");
    w.positive = required("positive");
    w.negative = required("negative");
    if (auto p = dir / "yes.txt"; std::filesystem::is_regular_file(p)) {
      w.yes = parse(read_file(p), false);
    }
    if (auto p = dir / "no.txt"; std::filesystem::is_regular_file(p)) {
      w.no = parse(read_file(p), false);
    }
    return w;
  }
};

// A token that is a yes/no form is counted only as yes/no.
inline Polarity count_polarity(std::string_view sentence, const WordLists& lists) {
  Polarity p;
  for (const Span& sp : text::tokenize(sentence)) {
    std::string_view surface = sentence.substr(sp.start, sp.size());
    std::string s(surface);
    const bool capital = text::is_upper(static_cast<unsigned char>(surface[0]));
    if (lists.yes.count(s) != 0) {
      ++p.yes;
      if (capital) ++p.yes_capitalized;
      continue;
    }
    if (lists.no.count(s) != 0) {
      ++p.no;
      if (capital) ++p.no_capitalized;
      continue;
    }
    std::string f = text::fold(surface);
    p.negation += lists.negation.count(f) != 0;
    p.amplifier += lists.amplifier.count(f) != 0;
    p.deamplifier += lists.deamplifier.count(f) != 0;
    p.positive += lists.positive.count(f) != 0;
    p.negative += lists.negative.count(f) != 0;
  }
  return p;
}

// Polarity-only segments for every sentence with at least one list hit.
inline std::vector<CodedSegment> annotate_content_words(const Corpus& corpus,
                                                        const WordLists& lists) {
  std::vector<CodedSegment> out;
  for (const auto& doc : corpus.documents) {
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      Polarity p = count_polarity(doc.sentence_text(i), lists);
      if (!p.any()) continue;
      CodedSegment seg;
      seg.document_id = doc.id;
      seg.sentence = i;
      seg.span = doc.sentences[i];
      seg.polarity = p;
      out.push_back(std::move(seg));
    }
  }
  return out;
}

// Copies the polarity of matching content-word segments onto code segments.
inline void attach_polarity(std::vector<CodedSegment>& segments,
                            const std::vector<CodedSegment>& content) {
  std::map<std::pair<std::string, std::size_t>, const Polarity*> index;
  for (const auto& c : content) index[{c.document_id, c.sentence}] = &c.polarity;
  for (auto& seg : segments) {
    auto it = index.find({seg.document_id, seg.sentence});
    seg.polarity = it == index.end() ? Polarity{} : *it->second;
  }
}

struct RelationCount {
  std::size_t inclusion = 0;
  std::size_t proximity = 0;
};

struct RelationStats {
  std::size_t window = 1;
  // ordered (a, b), a != b
  std::map<std::pair<std::string, std::string>, RelationCount> pairs;

  RelationCount get(const std::string& a, const std::string& b) const {
    auto it = pairs.find({a, b});
    return it == pairs.end() ? RelationCount{} : it->second;
  }

  std::string to_csv() const {
    std::string out = "category_a,category_b,inclusion,proximity,window\n";
    for (const auto& [k, v] : pairs) {
      out += csv::row({k.first, k.second, std::to_string(v.inclusion),
                       std::to_string(v.proximity), std::to_string(window)});
    }
    return out;
  }
};

// inclusion(a, b): a-segments whose span lies inside some b-segment of the
// same document. proximity(a, b): (a, b) segment pairs of one document at
// most `window` sentences apart, excluding pairs in an inclusion relation.
// Rejected segments take no part.
inline RelationStats relation_stats(const std::vector<CodedSegment>& segments,
                                    const std::vector<std::string>& categories,
                                    std::size_t window = 1) {
  RelationStats stats;
  stats.window = window;
  std::map<std::string, std::vector<const CodedSegment*>> by_category;
  for (const auto& seg : segments) {
    if (seg.status == ReviewStatus::kRejected) continue;
    for (const auto& c : seg.categories) by_category[c].push_back(&seg);
  }
  std::vector<std::string> cats = categories;
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
  for (const auto& a : cats) {
    for (const auto& b : cats) {
      if (a == b) continue;
      RelationCount rc;
      const auto& as = by_category[a];
      const auto& bs = by_category[b];
      for (const CodedSegment* x : as) {
        bool included = false;
        for (const CodedSegment* y : bs) {
          if (x->document_id != y->document_id) continue;
          const bool nested = y->span.contains(x->span);
          included = included || nested;
          const std::size_t gap =
              x->sentence > y->sentence ? x->sentence - y->sentence : y->sentence - x->sentence;
          if (!nested && !x->span.contains(y->span) && gap <= window) ++rc.proximity;
        }
        if (included) ++rc.inclusion;
      }
      stats.pairs[{a, b}] = rc;
    }
  }
  return stats;
}

struct OutlierFlag {
  std::string category;
  std::size_t transitional_codes = 0;
  bool flagged = false;
};

// Flags categories whose transitional-code count exceeds ratio x the
// second-largest count. Advisory only.
inline std::vector<OutlierFlag> flag_outlier_categories(const std::vector<Category>& categories,
                                                        double ratio = 2.0) {
  std::vector<OutlierFlag> out;
  std::vector<std::size_t> counts;
  for (const auto& c : categories) {
    out.push_back({c.lemma, c.transitional_codes.size(), false});
    counts.push_back(c.transitional_codes.size());
  }
  if (counts.size() < 2) return out;
  std::sort(counts.begin(), counts.end(), std::greater<>());
  const double second = static_cast<double>(counts[1]);
  for (auto& f : out) {
    f.flagged = static_cast<double>(f.transitional_codes) > ratio * second;
  }
  return out;
}

struct Concordance {
  std::size_t retrieved = 0;
  std::size_t validated = 0;
  std::optional<double> fraction;  // unset when nothing was validated
};

// A validated segment is retrieved when an auto segment of the same document
// overlaps it by at least one byte.
inline Concordance concordance(const std::vector<CodedSegment>& automatic,
                               const std::vector<CodedSegment>& validated) {
  std::map<std::string, std::vector<Span>> spans;
  for (const auto& a : automatic) spans[a.document_id].push_back(a.span);
  Concordance c;
  c.validated = validated.size();
  for (const auto& v : validated) {
    auto it = spans.find(v.document_id);
    if (it == spans.end()) continue;
    if (std::any_of(it->second.begin(), it->second.end(),
                    [&](const Span& s) { return s.overlaps(v.span); })) {
      ++c.retrieved;
    }
  }
  if (c.validated > 0) {
    c.fraction = static_cast<double>(c.retrieved) / static_cast<double>(c.validated);
  }
  return c;
}

inline const std::array<std::string_view, 16> kSegmentCsvHeader = {
    "document", "sentence", "start", "end", "codes", "categories", "status", "yes",
    "no", "negation", "amplifier", "deamplifier", "positive", "negative",
    "yes_capitalized", "no_capitalized"};

// codes: "surface:parent:start:end" joined by ';'; categories joined by ';'.
inline std::string segments_to_csv(const std::vector<CodedSegment>& segments) {
  std::vector<std::string> header(kSegmentCsvHeader.begin(), kSegmentCsvHeader.end());
  std::string out = csv::row(header);
  for (const auto& s : segments) {
    std::vector<std::string> codes;
    for (const auto& m : s.matches) {
      codes.push_back(m.code.surface + ":" + m.code.parent + ":" +
                      std::to_string(m.span.start) + ":" + std::to_string(m.span.end));
    }
    const Polarity& p = s.polarity;
    out += csv::row({s.document_id, std::to_string(s.sentence), std::to_string(s.span.start),
                     std::to_string(s.span.end), text::join(codes, ";"),
                     text::join(s.categories, ";"), to_string(s.status),
                     std::to_string(p.yes), std::to_string(p.no), std::to_string(p.negation),
                     std::to_string(p.amplifier), std::to_string(p.deamplifier),
                     std::to_string(p.positive), std::to_string(p.negative),
                     std::to_string(p.yes_capitalized), std::to_string(p.no_capitalized)});
  }
  return out;
}

// Reads segment CSVs by header name. Only document, start and end are
// required, so externally validated segment lists can be imported.
inline std::vector<CodedSegment> segments_from_csv(std::string_view content) {
  auto rows = csv::parse(content);
  if (rows.empty()) return {};
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
  for (const char* req : {"document", "start", "end"}) {
    if (col.count(req) == 0) {
      throw Error(ErrorCode::kValidation,
                  std::string("segment CSV: missing column '") + req + "'");
    }
  }
  auto field = [&](const std::vector<std::string>& r, const char* name) -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= r.size()) return {};
    return r[it->second];
  };
  auto number = [&](const std::vector<std::string>& r, const char* name) -> long long {
    std::string v = field(r, name);
    return v.empty() ? 0 : text::parse_int(v, name);
  };
  std::vector<CodedSegment> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    CodedSegment s;
    s.document_id = field(r, "document");
    s.sentence = static_cast<std::size_t>(number(r, "sentence"));
    s.span = {static_cast<std::size_t>(number(r, "start")),
              static_cast<std::size_t>(number(r, "end"))};
    if (s.span.end <= s.span.start) {
      throw Error(ErrorCode::kValidation,
                  "segment CSV line " + std::to_string(i + 1) + ": empty span");
    }
    if (auto codes = field(r, "codes"); !codes.empty()) {
      for (const auto& c : text::split(codes, ';')) {
        auto parts = text::split(c, ':');
        if (parts.size() != 4) {
          throw Error(ErrorCode::kValidation, "segment CSV: malformed code '" + c + "'");
        }
        s.matches.push_back({{parts[0], parts[1]},
                             {static_cast<std::size_t>(text::parse_int(parts[2], "code start")),
                              static_cast<std::size_t>(text::parse_int(parts[3], "code end"))}});
      }
    }
    if (auto cats = field(r, "categories"); !cats.empty()) s.categories = text::split(cats, ';');
    if (auto st = field(r, "status"); !st.empty()) s.status = parse_review_status(st);
    s.polarity.yes = static_cast<int>(number(r, "yes"));
    s.polarity.no = static_cast<int>(number(r, "no"));
    s.polarity.negation = static_cast<int>(number(r, "negation"));
    s.polarity.amplifier = static_cast<int>(number(r, "amplifier"));
    s.polarity.deamplifier = static_cast<int>(number(r, "deamplifier"));
    s.polarity.positive = static_cast<int>(number(r, "positive"));
    s.polarity.negative = static_cast<int>(number(r, "negative"));
    s.polarity.yes_capitalized = static_cast<int>(number(r, "yes_capitalized"));
    s.polarity.no_capitalized = static_cast<int>(number(r, "no_capitalized"));
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string transitional_codes_to_csv(const std::vector<TransitionalCode>& tcs) {
  std::string out = "lemma,best_abs_r,correlations\n";
  for (const auto& tc : tcs) {
    std::vector<std::string> corr;
    for (const auto& c : tc.correlations) corr.push_back(c.category + "=" + text::format_fixed(c.r, 6));
    out += csv::row({tc.lemma, text::format_fixed(tc.best_abs_r, 6), text::join(corr, ";")});
  }
  return out;
}

inline std::vector<TransitionalCode> transitional_codes_from_csv(std::string_view content) {
  std::vector<TransitionalCode> out;
  auto rows = csv::parse(content);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw Error(ErrorCode::kValidation, "transitional-code CSV: 3 columns");
    TransitionalCode tc;
    tc.lemma = r[0];
    tc.best_abs_r = text::parse_double(r[1], "best_abs_r");
    for (const auto& c : text::split(r[2], ';')) {
      auto eq = c.rfind('=');
      if (eq == std::string::npos) continue;
      tc.correlations.push_back({c.substr(0, eq), text::parse_double(c.substr(eq + 1), "r")});
    }
    out.push_back(std::move(tc));
  }
  return out;
}

inline std::string categories_to_csv(const std::vector<Category>& categories) {
  std::string out = "category,source_set,transitional_codes\n";
  for (const auto& c : categories) {
    out += csv::row({c.lemma, to_string(c.source_set), text::join(c.transitional_codes, ";")});
  }
  return out;
}

inline std::vector<Category> categories_from_csv(std::string_view content) {
  std::vector<Category> out;
  auto rows = csv::parse(content);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw Error(ErrorCode::kValidation, "category CSV: 3 columns");
    Category c;
    c.lemma = r[0];
    c.source_set = parse_set_label(r[1]);
    if (!r[2].empty()) c.transitional_codes = text::split(r[2], ';');
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace qdakit
