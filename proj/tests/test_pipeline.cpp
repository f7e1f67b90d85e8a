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

#include <string>

#include "support.hpp"

namespace qdakit {
namespace {

using testing::TempDir;
using testing::write;

const auto kFixedClock = [] { return std::string("2026-01-01T00:00:00Z"); };

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qdakit::Error thrown";
  return ErrorCode::kStorage;
}

TEST(PipelineConfig, TextRoundTripAndComments) {
  PipelineConfig c;
  c.set("alpha", "0.01");
  c.set("ego_extras", "antiviral, fever ,");
  c.set("cooccurrence_granularity", "sentence");
  auto back = PipelineConfig::from_text("# tuned\n" + c.to_text());
  for (const auto& k : PipelineConfig::keys()) EXPECT_EQ(back.get(k), c.get(k)) << k;
  EXPECT_EQ(back.get("ego_extras"), "antiviral,fever");
  EXPECT_EQ(PipelineConfig{}.get("low_pct"), "1");
  EXPECT_EQ(PipelineConfig{}.get("corr_step"), "0.05");
}

TEST(PipelineConfig, RejectsBadInput) {
  PipelineConfig c;
  EXPECT_EQ(code_of([&] { c.set("nope", "1"); }), ErrorCode::kConfiguration);
  EXPECT_EQ(code_of([&] { c.set("alpha", "abc"); }), ErrorCode::kConfiguration);
  EXPECT_EQ(code_of([&] { c.set("min_cluster_size", "-1"); }), ErrorCode::kConfiguration);
  EXPECT_EQ(code_of([] { PipelineConfig::from_text("alpha 0.1\n"); }), ErrorCode::kConfiguration);
  EXPECT_EQ(code_of([] { PipelineConfig::from_text("low_pct = 60\nhigh_pct = 40\n"); }),
            ErrorCode::kConfiguration);
  EXPECT_EQ(code_of([] { PipelineConfig::from_text("alpha = 1\n"); }), ErrorCode::kConfiguration);
  EXPECT_EQ(code_of([] { PipelineConfig::from_text("corr_step = 0\n"); }),
            ErrorCode::kConfiguration);
}

TEST(Stages, ParseAndDependencies) {
  for (Stage s : kStageOrder) EXPECT_EQ(parse_stage(to_string(s)), s);
  EXPECT_EQ(code_of([] { parse_stage("bogus"); }), ErrorCode::kConfiguration);
  // Every dependency precedes its stage.
  for (std::size_t i = 0; i < kStageOrder.size(); ++i) {
    for (Stage d : stage_dependencies(kStageOrder[i])) {
      auto pos = std::find(kStageOrder.begin(), kStageOrder.end(), d) - kStageOrder.begin();
      EXPECT_LT(static_cast<std::size_t>(pos), i);
    }
  }
}

TEST(Pipeline, OutOfOrderStageNamesEveryMissingUpstream) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  Pipeline p(project, {});
  p.run({Stage::kIngest, Stage::kVocab});
  try {
    p.run_stage(Stage::kSearch);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDependency);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("lemmatise, tdm, filter, categories"), std::string::npos) << msg;
    EXPECT_EQ(msg.find("ingest"), std::string::npos) << msg;
  }
  auto blocking = p.blocking_upstream(Stage::kSearch);
  EXPECT_EQ(blocking, (std::vector<Stage>{Stage::kLemmatise, Stage::kTdm, Stage::kFilter,
                                          Stage::kCategories}));
  EXPECT_EQ(p.state(Stage::kTdm), StageState::kMissing);
}

TEST(Pipeline, FullRunThenRerunIsFresh) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  Pipeline p(project, {});
  auto first = p.run();
  ASSERT_EQ(first.size(), kStageOrder.size());
  for (const auto& o : first) EXPECT_TRUE(o.ran) << to_string(o.stage);
  const auto hashes = testing::artifact_hashes(project);
  auto second = p.run();
  for (const auto& o : second) {
    EXPECT_FALSE(o.ran) << to_string(o.stage);
    EXPECT_FALSE(o.artifacts.empty()) << to_string(o.stage);
    EXPECT_EQ(p.state(o.stage), StageState::kFresh);
  }
  EXPECT_EQ(testing::artifact_hashes(project), hashes);
  EXPECT_EQ(second.front().to_json()["status"], "fresh");
}

TEST(Pipeline, SyntheticSearchWalksDesignedThresholds) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  Pipeline p(project, {});
  p.run();
  auto report = nlohmann::json::parse(project.load_artifact("report.json"));
  for (const char* set : {"training", "testing"}) {
    const auto& trace = report["sets"][set]["search_trace"];
    ASSERT_EQ(trace.size(), 3u) << set;
    const double thresholds[] = {1.0, 0.95, 0.90};
    const double coverage[] = {0.2, 0.4, 0.6};
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(text::parse_double(trace[i]["threshold"].get<std::string>(), "t"),
                  thresholds[i], 1e-9);
      EXPECT_NEAR(text::parse_double(trace[i]["coverage"].get<std::string>(), "c"), coverage[i],
                  1e-9);
    }
  }
  EXPECT_EQ(report["frequency_tables"].size(), 4u);
  EXPECT_EQ(report["concordance"]["applicable"], false);
  EXPECT_EQ(report["dictionary_version"], 1);
}

TEST(Pipeline, SameSeedSameArtifacts) {
  TempDir a;
  TempDir b;
  auto pa = testing::synthetic_project(a.path(), 7);
  auto pb = testing::synthetic_project(b.path(), 7);
  Pipeline(pa, {}).run();
  Pipeline(pb, {}).run();
  EXPECT_EQ(testing::artifact_hashes(pa), testing::artifact_hashes(pb));
}

TEST(Pipeline, DictionaryEditInvalidatesDownstreamOnly) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  Pipeline p(project, {});
  p.run();
  const auto before = p.dictionary().version();
  ASSERT_NE(p.dictionary().find("family"), nullptr);
  auto r = p.edit_dictionary("family", "household", before, kFixedClock);
  EXPECT_TRUE(r.changed);
  EXPECT_EQ(r.version, before + 1);
  EXPECT_EQ(p.dictionary().find("family")->lemma, "household");
  EXPECT_EQ(p.state(Stage::kIngest), StageState::kFresh);
  EXPECT_EQ(p.state(Stage::kVocab), StageState::kFresh);
  for (Stage s : {Stage::kLemmatise, Stage::kTdm, Stage::kReport}) {
    EXPECT_NE(p.state(s), StageState::kFresh) << to_string(s);
  }
  EXPECT_EQ(code_of([&] { p.run_stage(Stage::kTdm); }), ErrorCode::kDependency);

  auto same = p.edit_dictionary("family", "household", {}, kFixedClock);
  EXPECT_FALSE(same.changed);
  EXPECT_EQ(same.version, before + 1);
  EXPECT_EQ(code_of([&] { p.edit_dictionary("family", "kin", before, kFixedClock); }),
            ErrorCode::kConflict);
  EXPECT_EQ(project.read_log("dictionary_edits.csv"),
            "timestamp,key,old_lemma,new_lemma,provenance,version\n"
            "2026-01-01T00:00:00Z,family,family,household,manual,2\n");

  // Stages whose inputs come out byte-identical stay fresh.
  auto rerun = p.run();
  std::vector<std::string> ran;
  for (const auto& o : rerun) {
    if (o.ran) ran.push_back(to_string(o.stage));
    EXPECT_EQ(p.state(o.stage), StageState::kFresh) << to_string(o.stage);
  }
  EXPECT_EQ(ran, (std::vector<std::string>{"lemmatise", "tdm", "filter", "search", "graph",
                                           "cluster", "significance", "report"}));
  EXPECT_EQ(project.entry("tdm.training.csv")->dict_version, before + 1);
  const std::string tdm = project.load_artifact("tdm.training.csv");
  EXPECT_NE(tdm.find("\nhousehold,"), std::string::npos);
  EXPECT_EQ(tdm.find("\nfamily,"), std::string::npos);
}

TEST(Pipeline, ManualEditsSurviveVocabRerun) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  Pipeline p(project, {});
  p.run({Stage::kIngest, Stage::kVocab});
  p.edit_dictionary("village", "settlement", {}, kFixedClock);
  const auto version = p.dictionary().version();
  p.run_stage(Stage::kVocab, true);
  EXPECT_EQ(p.dictionary().find("village")->lemma, "settlement");
  EXPECT_EQ(p.dictionary().version(), version);
}

TEST(Pipeline, ParameterChangeReopensOnlyItsStages) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  Pipeline(project, {}).run();
  PipelineConfig tuned;
  tuned.alpha = 0.01;
  Pipeline p(project, tuned);
  EXPECT_EQ(p.state(Stage::kCluster), StageState::kFresh);
  EXPECT_EQ(p.state(Stage::kSignificance), StageState::kStale);
  EXPECT_EQ(p.state(Stage::kReport), StageState::kStale);
  auto out = p.run();
  std::vector<std::string> ran;
  for (const auto& o : out) {
    if (o.ran) ran.push_back(to_string(o.stage));
  }
  EXPECT_EQ(ran, (std::vector<std::string>{"significance", "report"}));
}

TEST(Pipeline, InputEditReopensIngest) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  Pipeline p(project, {});
  p.run();
  write(dir.path() / "inputs/training_questions/TQ03.txt", "Any other antibiotic?\n");
  EXPECT_EQ(p.state(Stage::kIngest), StageState::kStale);
  EXPECT_EQ(p.blocking_upstream(Stage::kTdm).front(), Stage::kIngest);
}

TEST(Pipeline, IngestRequiresQuestionSetAndUniqueIds) {
  {
    TempDir dir;
    auto project = testing::synthetic_project(dir.path());
    std::filesystem::remove_all(dir.path() / "inputs/training_questions");
    std::filesystem::remove_all(dir.path() / "inputs/testing_questions");
    Pipeline p(project, {});
    EXPECT_EQ(code_of([&] { p.run_stage(Stage::kIngest); }), ErrorCode::kIngestion);
  }
  {
    TempDir dir;
    auto project = testing::synthetic_project(dir.path());
    std::filesystem::copy_file(dir.path() / "inputs/training/T01.txt",
                               dir.path() / "inputs/testing/T01.txt");
    Pipeline p(project, {});
    EXPECT_EQ(code_of([&] { p.run_stage(Stage::kIngest); }), ErrorCode::kConflict);
  }
}

TEST(Pipeline, OneTranscriptSetIsEnough) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  std::filesystem::remove_all(dir.path() / "inputs/testing_questions");
  Pipeline p(project, {});
  auto out = p.run();
  EXPECT_EQ(p.transcript_sets(), std::vector<SetLabel>{SetLabel::kTraining});
  EXPECT_EQ(p.ingested_sets().size(), 3u);
  EXPECT_FALSE(out.front().warnings.empty());
  EXPECT_TRUE(project.has("segments.training.csv"));
  EXPECT_FALSE(project.has("segments.testing.csv"));
}

TEST(Pipeline, ReviewDecisionsFeedConcordance) {
  TempDir dir;
  auto project = testing::synthetic_project(dir.path());
  Pipeline p(project, {});
  p.run();
  auto segments = p.load_segments(SetLabel::kTraining);
  ASSERT_GE(segments.size(), 2u);
  ReviewState state;
  state.entries[segments[0].key()] = {ReviewStatus::kAccepted, {}, 1};
  state.entries[segments[1].key()] = {ReviewStatus::kRejected, {}, 1};
  state.entries["ghost:99"] = {ReviewStatus::kAccepted, {}, 1};
  p.save_review_state(state);
  EXPECT_EQ(p.state(Stage::kRelations), StageState::kStale);
  p.run();
  auto report = nlohmann::json::parse(project.load_artifact("report.json"));
  EXPECT_EQ(report["concordance"]["applicable"], true);
  EXPECT_EQ(report["concordance"]["validated"], 1);
  EXPECT_EQ(report["concordance"]["retrieved"], 1);
  EXPECT_EQ(report["concordance"]["fraction"], "1.0000");
  EXPECT_EQ(report["orphaned_reviews"], nlohmann::json::array({"ghost:99"}));
  EXPECT_EQ(report["sets"]["training"]["segments"]["by_status"]["rejected"], 1);
}

TEST(ReviewState, CsvRoundTripAndApply) {
  ReviewState s;
  s.entries["d1:0"] = {ReviewStatus::kReassigned, {"fever", "cough"}, 3};
  s.entries["d,2:4"] = {ReviewStatus::kRejected, {}, 1};
  EXPECT_EQ(s.to_csv(),
            "segment,status,categories,revision\n\"d,2:4\",rejected,,1\n"
            "d1:0,reassigned,fever;cough,3\n");
  auto back = ReviewState::from_csv(s.to_csv());
  EXPECT_EQ(back.entries, s.entries);

  CodedSegment seg;
  seg.document_id = "d1";
  seg.sentence = 0;
  seg.categories = {"antibiotic"};
  std::vector<CodedSegment> segs{seg};
  auto orphans = s.apply(segs);
  EXPECT_EQ(segs[0].status, ReviewStatus::kReassigned);
  EXPECT_EQ(segs[0].categories, (std::vector<std::string>{"fever", "cough"}));
  EXPECT_EQ(orphans, std::vector<std::string>{"d,2:4"});
  EXPECT_EQ(ReviewState::split_key("a:b:7"), (std::pair<std::string, std::size_t>{"a:b", 7}));
  EXPECT_EQ(code_of([] { ReviewState::split_key("nokey"); }), ErrorCode::kValidation);
}

TEST(Config, LoadFromProjectRoot) {
  TempDir dir;
  EXPECT_EQ(load_config(dir.path()).to_text(), PipelineConfig{}.to_text());
  write(dir.path() / std::string(kConfigFile), "min_cluster_size = 3\n");
  EXPECT_EQ(load_config(dir.path()).min_cluster_size, 3u);
}

}  // namespace
}  // namespace qdakit
