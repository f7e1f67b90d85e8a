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

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "support.hpp"

namespace qdakit {
namespace {

Document doc_of(const std::string& text, const std::string& id = "d") {
  return make_document(id, SetLabel::kTraining, text, ContractionTable::bundled());
}

Corpus corpus_of(const std::vector<std::string>& texts) {
  Corpus c;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    c.documents.push_back(doc_of(texts[i], "d" + std::to_string(i)));
  }
  return c;
}

std::vector<std::string> lemmas(const UnigramStream& s) {
  std::vector<std::string> out;
  for (const auto& it : s.items) out.push_back(it.lemma);
  return out;
}

std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

TEST(ExtractVocabulary, GroupsInflectionsUnderBase) {
  Corpus c = corpus_of({"Come here. He comes, came and is coming."});
  auto draft = extract_vocabulary({&c});
  for (const char* k : {"come", "comes", "came", "coming"}) {
    ASSERT_NE(draft.dictionary.find(k), nullptr) << k;
    EXPECT_EQ(draft.dictionary.find(k)->lemma, "come") << k;
    EXPECT_EQ(draft.dictionary.find(k)->provenance, Provenance::kAuto);
  }
  auto it = std::find_if(draft.groups.begin(), draft.groups.end(),
                         [](const DraftGroup& g) { return g.lemma == "come"; });
  ASSERT_NE(it, draft.groups.end());
  EXPECT_EQ(it->members.size(), 4u);
  EXPECT_TRUE(it->needs_review);
}

TEST(ExtractVocabulary, SingletonIsIdentity) {
  Corpus c = corpus_of({"xyzzy"});
  auto draft = extract_vocabulary({&c});
  ASSERT_EQ(draft.dictionary.size(), 1u);
  EXPECT_EQ(draft.dictionary.entries()[0],
            (LemmaEntry{"xyzzy", "xyzzy", "", Provenance::kAuto}));
  EXPECT_FALSE(draft.groups[0].needs_review);
}

TEST(ExtractVocabulary, AdverbKeptApartThenEditedManually) {
  Corpus c = corpus_of({"The patient waited patiently."});
  auto draft = extract_vocabulary({&c});
  EXPECT_EQ(draft.dictionary.find("patient")->lemma, "patient");
  EXPECT_EQ(draft.dictionary.find("patiently")->lemma, "patiently");
  auto it = std::find_if(draft.groups.begin(), draft.groups.end(),
                         [](const DraftGroup& g) { return g.lemma == "patiently"; });
  ASSERT_NE(it, draft.groups.end());
  EXPECT_EQ(it->suggested_base, std::optional<std::string>("patient"));
  EXPECT_TRUE(it->needs_review);

  LemmaDictionary dict = draft.dictionary;
  const auto v0 = dict.version();
  EXPECT_TRUE(dict.set("patiently", "patience", Provenance::kManual, "", fixed_clock));
  EXPECT_EQ(dict.version(), v0 + 1);
  EXPECT_EQ(dict.find("patiently")->lemma, "patience");
  EXPECT_EQ(dict.find("patiently")->provenance, Provenance::kManual);
}

TEST(ExtractVocabulary, EmptyCorpusWarns) {
  Corpus c;
  Diagnostics diag;
  auto draft = extract_vocabulary({&c}, &diag);
  EXPECT_TRUE(draft.dictionary.empty());
  EXPECT_EQ(diag.warnings().size(), 1u);
}

TEST(ExtractVocabulary, DeterministicCsv) {
  Corpus a = corpus_of({"Cases and case. Doctors, doctor!", "Running runs run."});
  Corpus b = corpus_of({"Running runs run.", "Cases and case. Doctors, doctor!"});
  EXPECT_EQ(extract_vocabulary({&a}).dictionary.to_csv(),
            extract_vocabulary({&b}).dictionary.to_csv());
  EXPECT_EQ(extract_vocabulary({&a}).dictionary.find("running")->lemma, "run");
}

TEST(Lemmatize, LongestMatchFirst) {
  LemmaDictionary dict;
  dict.set("swine flu", "swine flu", Provenance::kManual, "", fixed_clock);
  dict.set("swine", "pig", Provenance::kManual, "", fixed_clock);
  dict.set("cases", "case", Provenance::kManual, "", fixed_clock);
  auto s = apply_lemmatization(doc_of("swine flu cases"), dict);
  EXPECT_EQ(lemmas(s), (std::vector<std::string>{"swine flu", "case"}));
  EXPECT_EQ(s.items[0].span, (Span{0, 9}));
}

TEST(Lemmatize, EmptyDictionaryIsIdentity) {
  auto s = apply_lemmatization(doc_of("Antibiotics were Given"), LemmaDictionary{});
  EXPECT_EQ(lemmas(s), (std::vector<std::string>{"antibiotics", "were", "given"}));
}

TEST(Lemmatize, ManualEntriesApply) {
  LemmaDictionary dict;
  dict.set("patiently", "patience", Provenance::kManual, "", fixed_clock);
  dict.set("waiting", "wait", Provenance::kManual, "", fixed_clock);
  EXPECT_EQ(lemmas(apply_lemmatization(doc_of("patiently waiting"), dict)),
            (std::vector<std::string>{"patience", "wait"}));
}

TEST(Lemmatize, MultiwordNeverCrossesSentenceOrPunctuation) {
  LemmaDictionary dict;
  dict.set("swine flu", "swine flu", Provenance::kManual, "", fixed_clock);
  EXPECT_EQ(lemmas(apply_lemmatization(doc_of("It was swine. Flu came."), dict)),
            (std::vector<std::string>{"it", "was", "swine", "flu", "came"}));
  EXPECT_EQ(lemmas(apply_lemmatization(doc_of("swine, flu"), dict)),
            (std::vector<std::string>{"swine", "flu"}));
}

TEST(Lemmatize, HyphenatedWordIsOneToken) {
  LemmaDictionary dict;
  dict.set("follow-up", "follow-up", Provenance::kManual, "", fixed_clock);
  auto s = apply_lemmatization(doc_of("A follow-up visit."), dict);
  EXPECT_EQ(lemmas(s), (std::vector<std::string>{"a", "follow-up", "visit"}));
}

TEST(Lemmatize, PropertiesOnRandomText) {
  LemmaDictionary dict;
  dict.set("swine flu", "swine flu", Provenance::kManual, "", fixed_clock);
  dict.set("swine", "pig", Provenance::kManual, "", fixed_clock);
  dict.set("swine flu vaccine", "vaccine", Provenance::kManual, "", fixed_clock);
  dict.set("flu", "influenza", Provenance::kManual, "", fixed_clock);
  const std::vector<std::string> words{"swine", "Swine", "flu", "vaccine", "the", "and"};
  const std::vector<std::string> gaps{" ", " ", "  ", ", ", ". ", "\n\n"};
  std::mt19937 rng(17);
  for (int trial = 0; trial < 400; ++trial) {
    std::string t;
    for (int i = 0; i < 14; ++i) {
      t += words[rng() % words.size()];
      t += gaps[rng() % gaps.size()];
    }
    Document d = doc_of(t);
    auto s1 = apply_lemmatization(d, dict);
    ASSERT_EQ(s1.items, apply_lemmatization(d, dict).items);
    for (const auto& item : s1.items) {
      std::string surface = d.normalized_text.substr(item.span.start, item.span.size());
      std::string key = canonical_key(surface);
      const LemmaEntry* e = dict.find(key);
      if (e != nullptr) {
        ASSERT_EQ(e->lemma, item.lemma);
      } else {
        ASSERT_EQ(text::tokenize(surface).size(), 1u);
        ASSERT_EQ(item.lemma, text::fold(surface));
      }
      if (item.lemma == "pig") {
        // "swine" alone only when not directly followed by "flu" in-sentence
        std::string_view rest = std::string_view(d.normalized_text).substr(item.span.end);
        std::size_t k = 0;
        while (k < rest.size() && text::is_space(static_cast<unsigned char>(rest[k])) &&
               rest.substr(k, 2) != "\n\n") {
          ++k;
        }
        ASSERT_FALSE(k > 0 && text::fold(rest.substr(k, 3)) == "flu" &&
                     d.sentence_at(item.span.end + k) == item.sentence)
            << t;
      }
    }
    for (std::size_t i = 1; i < s1.items.size(); ++i) {
      ASSERT_LT(s1.items[i - 1].span.start, s1.items[i].span.start);
    }
  }
}

TEST(Stopwords, RemovesListed) {
  StopwordList the{"basic", {"the"}};
  UnigramStream s;
  for (const char* l : {"the", "antibiotic", "the"}) s.items.push_back({l, "d", 0, {}});
  auto r = remove_stopwords(s, {the});
  EXPECT_EQ(lemmas(r.stream), std::vector<std::string>{"antibiotic"});
  EXPECT_EQ(r.removed, 2u);
}

TEST(Stopwords, EmptyListsAreIdentity) {
  UnigramStream s;
  for (const char* l : {"a", "b"}) s.items.push_back({l, "d", 0, {}});
  auto r = remove_stopwords(s, {});
  EXPECT_EQ(r.stream.items, s.items);
  EXPECT_EQ(r.removed, 0u);
}

TEST(Stopwords, OverlappingListsUseUnion) {
  auto l1 = StopwordList::from_text("one", "the\nand\n# comment\n\n");
  auto l2 = StopwordList::from_text("two", "And\nof\n");
  UnigramStream s;
  for (const char* l : {"the", "and", "of", "flu", "and"}) s.items.push_back({l, "d", 0, {}});
  auto r = remove_stopwords(s, {l1, l2});
  std::set<std::string> uni(l1.words.begin(), l1.words.end());
  uni.insert(l2.words.begin(), l2.words.end());
  std::vector<std::string> expected;
  for (const auto& it : s.items) {
    if (uni.count(it.lemma) == 0) expected.push_back(it.lemma);
  }
  EXPECT_EQ(lemmas(r.stream), expected);
  EXPECT_EQ(r.removed, 4u);
  EXPECT_THROW(StopwordList::from_text("", "x"), Error);
}

TEST(Dictionary, VersionAndEditLog) {
  LemmaDictionary dict;
  EXPECT_TRUE(dict.set("Comes", "come", Provenance::kAuto, "", fixed_clock));
  EXPECT_FALSE(dict.set("comes", "come", Provenance::kManual, "", fixed_clock));
  EXPECT_EQ(dict.version(), 1u);
  EXPECT_TRUE(dict.set("comes", "arrive", Provenance::kManual, "", fixed_clock));
  EXPECT_TRUE(dict.remove("comes", fixed_clock));
  EXPECT_FALSE(dict.remove("comes", fixed_clock));
  EXPECT_EQ(dict.version(), 3u);
  ASSERT_EQ(dict.edit_log().size(), 3u);
  EXPECT_EQ(dict.edit_log()[1].old_lemma, "come");
  EXPECT_EQ(dict.edit_log()[1].new_lemma, "arrive");
  EXPECT_EQ(dict.edit_log()[2].new_lemma, "");
  EXPECT_EQ(dict.edit_log_csv(),
            "timestamp,key,old_lemma,new_lemma,provenance\n"
            "2026-01-01T00:00:00Z,comes,,come,auto\n"
            "2026-01-01T00:00:00Z,comes,come,arrive,manual\n"
            "2026-01-01T00:00:00Z,comes,arrive,,manual\n");
}

TEST(Dictionary, RejectsInvalidKeysAndLemmas) {
  LemmaDictionary dict;
  EXPECT_THROW(dict.set("", "x"), Error);
  EXPECT_THROW(dict.set("one two three four five", "x"), Error);
  EXPECT_THROW(dict.set("a, b", "x"), Error);
  EXPECT_THROW(dict.set("ok", "Upper"), Error);
  EXPECT_THROW(dict.set("ok", " padded"), Error);
  EXPECT_EQ(dict.version(), 0u);
  EXPECT_EQ(canonical_key("  Swine   FLU "), "swine flu");
}

TEST(Dictionary, CsvIsSortedAndRoundTrips) {
  LemmaDictionary dict;
  dict.set("zeta", "z", Provenance::kManual, "n", fixed_clock);
  dict.set("alpha", "a,b", Provenance::kAuto, "", fixed_clock);
  const std::string csv = dict.to_csv();
  EXPECT_EQ(csv, "key,lemma,pos_hint,provenance\nalpha,\"a,b\",,auto\nzeta,z,n,manual\n");
  auto back = LemmaDictionary::from_csv(csv, 7);
  EXPECT_EQ(back.to_csv(), csv);
  EXPECT_EQ(back.version(), 7u);
  EXPECT_THROW(LemmaDictionary::from_csv("k,l\n"), Error);
  EXPECT_THROW(LemmaDictionary::from_csv(
                   "key,lemma,pos_hint,provenance\na,a,,auto\nA,b,,auto\n"),
               Error);
}

TEST(Stream, CsvRoundTrip) {
  auto s = apply_lemmatization(doc_of("Some text. More text here."), LemmaDictionary{});
  EXPECT_EQ(stream_from_csv(stream_to_csv(s)).items, s.items);
}

}  // namespace
}  // namespace qdakit
