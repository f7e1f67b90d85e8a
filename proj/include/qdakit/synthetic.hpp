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

// Seeded synthetic interview project.
//
// Each transcript set has ten documents of eight-token sentences. Per
// document, a code word occurs in exactly as many sentences as its count
// vector says, so its count row is that vector. Against the category rows
// the codes correlate at 1.0, about 0.96 and about 0.91, and each tier adds
// 60 coded sentences out of 300, giving coverage 0.2, 0.4 and 0.6 as the
// threshold walks 1.0, 0.95, 0.90. Category words ride inside the r = 1
// code sentences; two noise words with near-zero correlation ride inside
// arbitrary code sentences.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qdakit/project_store.hpp"

namespace qdakit {

inline constexpr std::uint64_t kDefaultSyntheticSeed = 20260101;
inline constexpr std::size_t kSyntheticDocuments = 10;
inline constexpr std::size_t kSyntheticSentenceTokens = 8;
inline constexpr std::size_t kSyntheticFillerPerDocument = 12;
inline constexpr std::size_t kSyntheticParagraphSentences = 4;

using CountVector = std::array<int, kSyntheticDocuments>;

struct SyntheticWord {
  std::string word;
  CountVector counts;
  std::string companion;  // occurs in the same sentences when set
};

struct SyntheticSet {
  std::string directory;
  std::string prefix;
  std::vector<SyntheticWord> codes;
  std::vector<SyntheticWord> noise;
};

struct SyntheticFile {
  std::string path;  // relative to the project root
  std::string content;
};

namespace detail {

inline CountVector reversed(CountVector v) {
  std::reverse(v.begin(), v.end());
  return v;
}

// Uniform draws and shuffles from the raw engine output, so the bytes do not
// depend on the standard library's distribution implementations.
class SyntheticRng {
 public:
  explicit SyntheticRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "the", "we", "on", "that", "day", "then", "so", "it", "at", "of", "in",
      "to", "there", "what", "this", "yes", "no", "not", "very", "really", "just"};
  return words;
}

inline const std::vector<std::string>& question_words() {
  static const std::vector<std::string> words = {"tell", "me", "about", "how", "did",
                                                 "you", "manage", "give", "for", "and"};
  return words;
}

inline std::string make_sentence(std::vector<std::string> content, SyntheticRng& rng) {
  const auto& filler = filler_words();
  while (content.size() < kSyntheticSentenceTokens) {
    content.push_back(filler[rng.below(filler.size())]);
  }
  rng.shuffle(content);
  std::string s = text::join(content, " ");
  s[0] = text::to_upper(s[0]);
  return s + ".";
}

inline std::string make_document(const SyntheticSet& set, std::size_t doc, SyntheticRng& rng) {
  std::vector<std::vector<std::string>> code_sentences;
  for (const auto& code : set.codes) {
    for (int k = 0; k < code.counts[doc]; ++k) {
      std::vector<std::string> words{code.word};
      if (!code.companion.empty()) words.push_back(code.companion);
      code_sentences.push_back(std::move(words));
    }
  }
  for (const auto& noise : set.noise) {
    for (int k = 0; k < noise.counts[doc]; ++k) {
      // Any code sentence with room; sentences are checked in a random order.
      std::vector<std::size_t> order(code_sentences.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.shuffle(order);
      for (std::size_t i : order) {
        if (code_sentences[i].size() < kSyntheticSentenceTokens - 2) {
          code_sentences[i].push_back(noise.word);
          break;
        }
      }
    }
  }
  std::vector<std::string> sentences;
  for (auto& words : code_sentences) sentences.push_back(make_sentence(words, rng));
  for (std::size_t k = 0; k < kSyntheticFillerPerDocument; ++k) {
    sentences.push_back(make_sentence({}, rng));
  }
  rng.shuffle(sentences);
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += i % kSyntheticParagraphSentences == 0 ? "\n\n" : " ";
    out += sentences[i];
  }
  return out + "\n";
}

inline std::string two_digits(std::size_t i) {
  return (i < 10 ? "0" : "") + std::to_string(i);
}

}  // namespace detail

inline std::vector<SyntheticSet> synthetic_sets() {
  const CountVector a = {1, 3, 2, 4, 3, 5, 2, 4, 1, 5};
  const CountVector f = {3, 3, 1, 1, 4, 4, 2, 2, 5, 5};
  const CountVector a95 = {1, 3, 2, 4, 4, 5, 1, 4, 1, 5};
  const CountVector f95 = {4, 3, 1, 1, 4, 4, 1, 2, 5, 5};
  const CountVector a90 = {0, 2, 3, 4, 4, 5, 2, 4, 1, 5};
  const CountVector f90 = {3, 3, 2, 0, 3, 5, 2, 1, 6, 5};
  const CountVector n1 = {1, 2, 2, 1, 1, 2, 1, 2, 2, 1};
  const CountVector n2 = {2, 2, 1, 1, 2, 1, 2, 1, 1, 2};
  using detail::reversed;
  SyntheticSet training{"training", "T",
                        {{"amoxicillin", a, "antibiotic"},
                         {"paracetamol", f, "fever"},
                         {"azithromycin", a95, ""},
                         {"temperature", f95, ""},
                         {"prescription", a90, "antiviral"},
                         {"tepid", f90, ""}},
                        {{"family", n1, ""}, {"village", n2, ""}}};
  SyntheticSet testing{"testing", "S",
                       {{"oseltamivir", reversed(a), "antiviral"},
                        {"zanamivir", reversed(f), "cough"},
                        {"honey", reversed(a95), ""},
                        {"syrup", reversed(f95), ""},
                        {"isolation", reversed(a90), "antibiotic"},
                        {"steam", reversed(f90), ""}},
                       {{"family", reversed(n1), ""}, {"village", reversed(n2), ""}}};
  return {training, testing};
}

inline std::vector<SyntheticFile> generate_synthetic(std::uint64_t seed = kDefaultSyntheticSeed) {
  detail::SyntheticRng rng(seed);
  std::vector<SyntheticFile> files;
  for (const auto& set : synthetic_sets()) {
    for (std::size_t d = 0; d < kSyntheticDocuments; ++d) {
      files.push_back({"inputs/" + set.directory + "/" + set.prefix +
                           detail::two_digits(d + 1) + ".txt",
                       detail::make_document(set, d, rng)});
    }
  }
  files.push_back({"inputs/training_questions/TQ01.txt",
                   "Tell me about the antibiotic on that day.\n\nHow did you manage the fever?\n"});
  files.push_back({"inputs/training_questions/TQ02.txt",
                   "What antibiotic did you give for the fever?\n"});
  files.push_back({"inputs/testing_questions/SQ01.txt",
                   "Tell me about the antiviral on that day.\n\nHow did you manage the cough?\n"});
  files.push_back({"inputs/testing_questions/SQ02.txt",
                   "What antiviral did you give for the cough?\n"});
  std::string stop;
  for (const auto& w : detail::filler_words()) stop += w + "\n";
  for (const auto& w : detail::question_words()) stop += w + "\n";
  files.push_back({"inputs/stopwords/synthetic.txt", stop});
  return files;
}

inline void write_synthetic(const std::filesystem::path& root,
                            std::uint64_t seed = kDefaultSyntheticSeed) {
  for (const auto& f : generate_synthetic(seed)) atomic_write(root / f.path, f.content);
}

}  // namespace qdakit
