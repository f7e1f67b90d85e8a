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

// The analyst-editable lemma dictionary and everything that reads it:
// draft vocabulary extraction, longest-match lemmatisation and stopword
// removal.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qdakit/corpus.hpp"
#include "qdakit/error.hpp"
#include "qdakit/resources.hpp"
#include "qdakit/text.hpp"

namespace qdakit {

enum class Provenance { kAuto, kManual };

inline std::string to_string(Provenance p) {
  return p == Provenance::kAuto ? "auto" : "manual";
}

inline Provenance parse_provenance(std::string_view s) {
  if (s == "auto") return Provenance::kAuto;
  if (s == "manual") return Provenance::kManual;
  throw Error(ErrorCode::kValidation,
              "unknown provenance '" + std::string(s) + "'");
}

struct LemmaEntry {
  std::string key;
  std::string lemma;
  std::string pos_hint;
  Provenance provenance = Provenance::kAuto;

  friend bool operator==(const LemmaEntry&, const LemmaEntry&) = default;
};

struct DictionaryEdit {
  std::string timestamp;
  std::string key;
  std::string old_lemma;  // empty when the key was created
  std::string new_lemma;  // empty when the key was removed
  Provenance provenance = Provenance::kManual;
};

inline constexpr std::size_t kMaxKeyTokens = 4;

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Canonical key form: folded tokens joined by single spaces. Throws a
// validation error unless the key is 1..4 whitespace-separated words.
inline std::string canonical_key(std::string_view raw) {
  std::string_view key = text::trim(raw);
  auto tokens = text::tokenize(key);
  if (tokens.empty() || tokens.size() > kMaxKeyTokens) {
    throw Error(ErrorCode::kValidation,
                "dictionary key '" + std::string(raw) +
                    "' must have 1 to 4 words");
  }
  std::size_t prev = 0;
  std::vector<std::string> parts;
  for (const Span& t : tokens) {
    if (!text::whitespace_only(key.substr(prev, t.start - prev))) {
      throw Error(ErrorCode::kValidation,
                  "dictionary key '" + std::string(raw) +
                      "' contains punctuation between words");
    }
    parts.push_back(text::fold(key.substr(t.start, t.size())));
    prev = t.end;
  }
  if (prev != key.size()) {
    throw Error(ErrorCode::kValidation,
                "dictionary key '" + std::string(raw) +
                    "' has trailing punctuation");
  }
  return text::join(parts, " ");
}

inline void validate_lemma(std::string_view lemma) {
  if (lemma.empty() || text::trim(lemma).size() != lemma.size()) {
    throw Error(ErrorCode::kValidation,
                "lemma must be non-empty with no surrounding whitespace");
  }
  if (text::fold(lemma) != lemma) {
    throw Error(ErrorCode::kValidation,
                "lemma '" + std::string(lemma) + "' must be lowercase");
  }
  for (char c : lemma) {
    if (static_cast<unsigned char>(c) < 0x20) {
      throw Error(ErrorCode::kValidation, "lemma contains control characters");
    }
  }
}

// Surface key -> lemma mapping. Every mutation bumps the version and appends
// to the edit log; no-op edits change nothing.
class LemmaDictionary {
 public:
  using Clock = std::function<std::string()>;

  LemmaDictionary() = default;

  std::uint64_t version() const { return version_; }
  const std::vector<DictionaryEdit>& edit_log() const { return edit_log_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Entries ordered by key.
  std::vector<LemmaEntry> entries() const {
    std::vector<LemmaEntry> out;
    out.reserve(entries_.size());
    for (const auto& [k, e] : entries_) out.push_back(e);
    return out;
  }

  const LemmaEntry* find(std::string_view key) const {
    auto it = entries_.find(std::string(key));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t max_key_tokens() const { return max_tokens_; }

  // Returns true if the dictionary changed.
  bool set(std::string_view raw_key, std::string_view lemma,
           Provenance provenance = Provenance::kManual,
           std::string_view pos_hint = {}, const Clock& clock = utc_timestamp) {
    std::string key = canonical_key(raw_key);
    validate_lemma(lemma);
    auto it = entries_.find(key);
    std::string old_lemma;
    if (it != entries_.end()) {
      if (it->second.lemma == lemma && it->second.pos_hint == pos_hint) {
        return false;
      }
      old_lemma = it->second.lemma;
    }
    LemmaEntry entry{key, std::string(lemma), std::string(pos_hint), provenance};
    entries_[key] = entry;
    note_key(key);
    ++version_;
    edit_log_.push_back({clock(), key, old_lemma, std::string(lemma), provenance});
    return true;
  }

  bool remove(std::string_view raw_key, const Clock& clock = utc_timestamp) {
    std::string key = canonical_key(raw_key);
    auto it = entries_.find(key);
    if (it == entries_.end()) return false;
    std::string old_lemma = it->second.lemma;
    entries_.erase(it);
    ++version_;
    edit_log_.push_back({clock(), key, old_lemma, "", Provenance::kManual});
    return true;
  }

  // Keys (surface forms) whose lemma equals `lemma`, ordered.
  std::vector<std::string> keys_for(std::string_view lemma) const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_) {
      if (e.lemma == lemma) out.push_back(k);
    }
    return out;
  }

  // key,lemma,pos_hint,provenance sorted by key; byte-deterministic.
  std::string to_csv() const {
    std::string out = "key,lemma,pos_hint,provenance\n";
    for (const auto& [k, e] : entries_) {
      out += csv::row({e.key, e.lemma, e.pos_hint, to_string(e.provenance)});
    }
    return out;
  }

  static LemmaDictionary from_csv(std::string_view content,
                                  std::uint64_t version = 0) {
    auto rows = csv::parse(content);
    if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "key") {
      throw Error(ErrorCode::kValidation,
                  "dictionary CSV: header 'key,lemma,pos_hint,provenance' "
                  "required");
    }
    LemmaDictionary dict;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() != 4) {
        throw Error(ErrorCode::kValidation, "dictionary CSV line " +
                                                std::to_string(i + 1) +
                                                ": expected 4 columns");
      }
      std::string key = canonical_key(r[0]);
      validate_lemma(r[1]);
      if (dict.entries_.count(key) != 0) {
        throw Error(ErrorCode::kValidation,
                    "dictionary CSV: duplicate key '" + key + "'");
      }
      dict.entries_[key] = {key, r[1], r[2], parse_provenance(r[3])};
      dict.note_key(key);
    }
    dict.version_ = version;
    return dict;
  }

  std::string edit_log_csv() const {
    std::string out = "timestamp,key,old_lemma,new_lemma,provenance\n";
    for (const auto& e : edit_log_) {
      out += csv::row({e.timestamp, e.key, e.old_lemma, e.new_lemma,
                       to_string(e.provenance)});
    }
    return out;
  }

  // Adds entries without versioning; used when building a draft.
  void insert_draft(LemmaEntry entry) {
    note_key(entry.key);
    entries_[entry.key] = std::move(entry);
  }

 private:
  void note_key(const std::string& key) {
    std::size_t words =
        static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
    max_tokens_ = std::max(max_tokens_, words);
  }

  std::map<std::string, LemmaEntry> entries_;
  std::uint64_t version_ = 0;
  std::size_t max_tokens_ = 1;
  std::vector<DictionaryEdit> edit_log_;
};

// A set of surface forms the draft grouped under one lemma.
struct DraftGroup {
  std::string lemma;
  std::vector<std::string> members;
  // Set for "-ly" adverbs whose adjective/noun base is also present; they
  // are kept apart and offered for review instead of being merged.
  std::optional<std::string> suggested_base;
  bool needs_review = false;
};

struct DraftVocabulary {
  LemmaDictionary dictionary;
  std::vector<DraftGroup> groups;  // ordered by lemma
};

namespace detail {

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

// Inflectional base candidates of `token` (not checked against the
// vocabulary). "-ly" is handled separately.
inline std::vector<std::string> base_candidates(const std::string& token) {
  std::vector<std::string> out;
  for (const auto& [form, base] : resources::kIrregularForms) {
    if (form == token) out.emplace_back(base);
  }
  auto strip = [&](std::string_view suffix, std::string_view add) {
    if (ends_with(token, suffix) && token.size() > suffix.size() + 1) {
      std::string stem = token.substr(0, token.size() - suffix.size());
      out.push_back(stem + std::string(add));
      // doubled final consonant: stopped -> stop, running -> run
      if (add.empty() && stem.size() >= 3 &&
          stem[stem.size() - 1] == stem[stem.size() - 2]) {
        out.push_back(stem.substr(0, stem.size() - 1));
      }
    }
  };
  strip("ies", "y");
  strip("es", "");
  if (!ends_with(token, "ss")) strip("s", "");
  strip("ed", "");
  strip("ed", "e");
  strip("ing", "");
  strip("ing", "e");
  return out;
}

inline std::optional<std::string> adverb_base(const std::string& token) {
  if (!ends_with(token, "ly") || token.size() < 5) return std::nullopt;
  std::string stem = token.substr(0, token.size() - 2);
  return stem;
}

}  // namespace detail

// Builds a draft dictionary: one auto entry per distinct folded token, with
// inflected forms grouped under their base when the base itself occurs.
inline DraftVocabulary extract_vocabulary(const std::vector<const Corpus*>& corpora,
                                          Diagnostics* diag = nullptr) {
  std::set<std::string> vocab;
  for (const Corpus* corpus : corpora) {
    for (const auto& doc : corpus->documents) {
      std::string_view t = doc.normalized_text;
      for (const Span& s : text::tokenize(t)) {
        vocab.insert(text::fold(t.substr(s.start, s.size())));
      }
    }
  }
  DraftVocabulary draft;
  if (vocab.empty()) {
    warn(diag, "empty corpus: draft vocabulary is empty");
    return draft;
  }

  std::vector<std::string> words(vocab.begin(), vocab.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < words.size(); ++i) index[words[i]] = i;

  std::vector<std::size_t> parent(words.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  std::vector<bool> has_base(words.size(), false);
  std::map<std::string, std::string> adverb_of;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::optional<std::string> best;
    for (const auto& cand : detail::base_candidates(words[i])) {
      if (cand == words[i] || vocab.count(cand) == 0) continue;
      if (!best || cand.size() < best->size() ||
          (cand.size() == best->size() && cand < *best)) {
        best = cand;
      }
    }
    if (best) {
      has_base[i] = true;
      parent[root(i)] = root(index[*best]);
    } else if (auto adv = detail::adverb_base(words[i]);
               adv && vocab.count(*adv) != 0) {
      adverb_of[words[i]] = *adv;
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < words.size(); ++i) groups[root(i)].push_back(i);

  for (auto& [r, members] : groups) {
    // Lemma: the shortest member that has no base of its own.
    std::optional<std::size_t> lemma_idx;
    for (std::size_t m : members) {
      if (has_base[m]) continue;
      if (!lemma_idx || words[m].size() < words[*lemma_idx].size() ||
          (words[m].size() == words[*lemma_idx].size() &&
           words[m] < words[*lemma_idx])) {
        lemma_idx = m;
      }
    }
    if (!lemma_idx) lemma_idx = members.front();
    DraftGroup group;
    group.lemma = words[*lemma_idx];
    for (std::size_t m : members) {
      group.members.push_back(words[m]);
      draft.dictionary.insert_draft(
          {words[m], group.lemma, "", Provenance::kAuto});
    }
    if (auto it = adverb_of.find(group.lemma);
        it != adverb_of.end() && members.size() == 1) {
      group.suggested_base = it->second;
    }
    group.needs_review = group.members.size() > 1 || group.suggested_base;
    draft.groups.push_back(std::move(group));
  }
  std::sort(draft.groups.begin(), draft.groups.end(),
            [](const DraftGroup& a, const DraftGroup& b) {
              return a.lemma < b.lemma;
            });
  return draft;
}

inline std::string draft_groups_csv(const std::vector<DraftGroup>& groups) {
  std::string out = "lemma,members,suggested_base,needs_review\n";
  for (const auto& g : groups) {
    out += csv::row({g.lemma, text::join(g.members, ";"),
                     g.suggested_base.value_or(""),
                     g.needs_review ? "yes" : "no"});
  }
  return out;
}

struct UnigramItem {
  std::string lemma;
  std::string document_id;
  std::size_t sentence = 0;
  Span span;

  friend bool operator==(const UnigramItem&, const UnigramItem&) = default;
};

struct UnigramStream {
  std::vector<UnigramItem> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

// Greedy left-to-right longest match over the document's tokens. Multiword
// keys match only inside one sentence across whitespace-only gaps; tokens
// without an entry map to their folded selves.
inline UnigramStream apply_lemmatization(const Document& doc,
                                         const LemmaDictionary& dict) {
  UnigramStream stream;
  std::string_view t = doc.normalized_text;
  auto tokens = text::tokenize(t);
  std::vector<std::string> folded;
  std::vector<std::optional<std::size_t>> sentence_of;
  folded.reserve(tokens.size());
  for (const Span& s : tokens) {
    folded.push_back(text::fold(t.substr(s.start, s.size())));
    sentence_of.push_back(doc.sentence_at(s.start));
  }
  const std::size_t max_n = std::min(dict.max_key_tokens(), kMaxKeyTokens);
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!sentence_of[i]) {
      ++i;
      continue;
    }
    std::size_t matched = 0;
    const LemmaEntry* entry = nullptr;
    for (std::size_t n = std::min(max_n, tokens.size() - i); n >= 2; --n) {
      bool contiguous = true;
      std::string key = folded[i];
      for (std::size_t k = 1; k < n && contiguous; ++k) {
        const Span& prev = tokens[i + k - 1];
        const Span& cur = tokens[i + k];
        contiguous = sentence_of[i + k] == sentence_of[i] &&
                     text::whitespace_only(t.substr(prev.end, cur.start - prev.end));
        key += ' ';
        key += folded[i + k];
      }
      if (!contiguous) continue;
      if ((entry = dict.find(key)) != nullptr) {
        matched = n;
        break;
      }
    }
    if (matched == 0) {
      matched = 1;
      entry = dict.find(folded[i]);
    }
    UnigramItem item;
    item.lemma = entry != nullptr ? entry->lemma : folded[i];
    item.document_id = doc.id;
    item.sentence = *sentence_of[i];
    item.span = {tokens[i].start, tokens[i + matched - 1].end};
    stream.items.push_back(std::move(item));
    i += matched;
  }
  return stream;
}

struct StopwordList {
  std::string name;
  std::set<std::string> words;

  // One word per line; blank lines and '#' comments are ignored.
  static StopwordList from_text(std::string name, std::string_view content) {
    if (name.empty()) {
      throw Error(ErrorCode::kValidation, "stopword list needs a name");
    }
    StopwordList list;
    list.name = std::move(name);
    for (const auto& line : text::split_lines(content)) {
      std::string_view w = text::trim(line);
      if (w.empty() || w[0] == '#') continue;
      list.words.insert(text::fold(w));
    }
    return list;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& w : words) out += w + "\n";
    return out;
  }
};

struct StopwordResult {
  UnigramStream stream;
  std::size_t removed = 0;
};

// Drops every item whose lemma is in any list (union semantics).
inline StopwordResult remove_stopwords(const UnigramStream& stream,
                                       const std::vector<StopwordList>& lists) {
  StopwordResult result;
  for (const auto& item : stream.items) {
    bool stop = std::any_of(lists.begin(), lists.end(), [&](const StopwordList& l) {
      return l.words.count(item.lemma) != 0;
    });
    if (stop) {
      ++result.removed;
    } else {
      result.stream.items.push_back(item);
    }
  }
  return result;
}

inline std::string stream_to_csv(const UnigramStream& stream) {
  std::string out = "document,sentence,start,end,lemma\n";
  for (const auto& it : stream.items) {
    out += csv::row({it.document_id, std::to_string(it.sentence),
                     std::to_string(it.span.start), std::to_string(it.span.end),
                     it.lemma});
  }
  return out;
}

inline UnigramStream stream_from_csv(std::string_view content) {
  auto rows = csv::parse(content);
  UnigramStream stream;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 5) {
      throw Error(ErrorCode::kValidation, "stream CSV: expected 5 columns");
    }
    stream.items.push_back(
        {r[4], r[0], static_cast<std::size_t>(text::parse_int(r[1], "sentence")),
         {static_cast<std::size_t>(text::parse_int(r[2], "start")),
          static_cast<std::size_t>(text::parse_int(r[3], "end"))}});
  }
  return stream;
}

}  // namespace qdakit
