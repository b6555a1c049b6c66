// Copyright 2026 The Authorid Authors.
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

#include <fstream>

#include "doctest.h"

#include "authorid/errors.h"
#include "authorid/records.h"
#include "authorid/store.h"
#include "support/oracles.h"

namespace authorid {
namespace {

namespace fs = std::filesystem;

TextSample Sample(const std::string& id, std::optional<std::string> author,
                  Split split, const std::string& text = "some text") {
  TextSample s;
  s.sample_id = id;
  s.author = std::move(author);
  s.split = split;
  s.text = text;
  s.created_at = "2026-01-02T03:04:05Z";
  return s;
}

VerdictRecord Record(const std::string& item, std::uint64_t item_step,
                     std::uint64_t applied_step, bool accepted = true) {
  VerdictRecord r;
  r.verdict.item_id = item;
  r.verdict.accepted = accepted;
  r.attribution.scores = {0.7, 0.2, 0.1};
  r.attribution.weighted = {0.7, 0.2, 0.1};
  r.attribution.margin = 0.5;
  if (!accepted) r.verdict.true_author = 1;
  r.verdict.xi = ComputeXi(r.attribution, {accepted, r.verdict.true_author});
  r.item_step = item_step;
  r.applied_step = applied_step;
  r.recorded_at = "2026-01-02T03:04:05Z";
  return r;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST_SUITE("store") {

TEST_CASE("sample ids are restricted to a safe alphabet") {
  CHECK(IsValidSampleId("a-b_c.1"));
  CHECK_FALSE(IsValidSampleId(""));
  CHECK_FALSE(IsValidSampleId(".hidden"));
  CHECK_FALSE(IsValidSampleId("../x"));
  CHECK_FALSE(IsValidSampleId("a b"));
  CHECK_FALSE(IsValidSampleId(std::string(129, 'a')));
  CHECK(IsValidSampleId(std::string(128, 'a')));
}

TEST_CASE("samples round trip byte-exactly and survive a reopen") {
  testing::TempDir dir("store");
  const std::string text = "Caf\xC3\xA9\r\n  spaced\ttext\n";
  TextSample s = Sample("s1", "alice", Split::kTrain, text);
  s.features = FeatureVector{{1, 2}, {1.0 / 3, 2.0 / 3}, 3, 1};
  s.lexicon_version = 4;
  {
    Store store(dir.path());
    store.PutSample(s);
    store.PutSample(Sample("s2", std::nullopt, Split::kUnlabeled));
    CHECK(store.GetSample("s1") == s);
    CHECK_THROWS_AS(store.PutSample(s), DuplicateError);
  }
  Store reopened(dir.path());
  CHECK(reopened.SampleCount() == 2);
  CHECK(reopened.GetSample("s1") == s);
  CHECK(ReadFile(dir.path() / "samples" / "s1.txt") == text);
  CHECK(reopened.ListSamples(Split::kTrain).size() == 1);
  CHECK(reopened.ListSamples().front().sample_id == "s1");
  CHECK_THROWS_AS(reopened.GetSample("nope"), NotFoundError);
}

TEST_CASE("invalid samples are refused") {
  testing::TempDir dir("store");
  Store store(dir.path());
  CHECK_THROWS_AS(store.PutSample(Sample("../evil", "a", Split::kTrain)),
                  DomainError);
  CHECK_THROWS_AS(store.PutSample(Sample("e", "a", Split::kTrain, "")),
                  DomainError);
  CHECK_THROWS_AS(store.PutSample(Sample("v", std::nullopt, Split::kValidation)),
                  DomainError);
  CHECK(store.SampleCount() == 0);
}

TEST_CASE("groups and fallbacks persist") {
  testing::TempDir dir("store");
  Store store(dir.path());
  CHECK_FALSE(store.LoadGroups());
  GroupLexicon lex;
  lex.AddWord("the", "func");
  lex.AddWord("cat", "noun");
  store.SaveGroups(lex);
  CHECK(store.LoadGroups()->SortedDictionary() == lex.SortedDictionary());
  fs::create_directories(dir.path() / "fallbacks");
  std::ofstream(dir.path() / "fallbacks" / "b.tsv") << "x\tdog\n";
  std::ofstream(dir.path() / "fallbacks" / "a.tsv") << "y\tdog\n";
  const auto fb = store.LoadFallbacks();
  REQUIRE(fb.size() == 2);
  CHECK(*fb[0].Find("dog") == "y");
}

TEST_CASE("publishing swaps the serving snapshot atomically") {
  testing::TempDir dir("store");
  const testing::Fixture fx = testing::MakeFixture();
  Store store(dir.path());
  CHECK_FALSE(store.LoadServing());
  EvaluationRecord eval;
  eval.accuracy = 0.9;
  const std::string id = store.PublishSnapshot(fx.bundle, eval);
  CHECK(id == fx.bundle.snapshot_id());
  const SnapshotRegistry reg = store.Registry();
  CHECK(reg.serving_snapshot_id == id);
  REQUIRE(reg.history.size() == 1);
  CHECK(reg.history[0].eval.accuracy == 0.9);
  CHECK(store.LoadServing()->model == fx.bundle.model);
  CHECK_THROWS_AS(store.LoadSnapshot("snap-0000000000000000"), NotFoundError);
}

TEST_CASE("a failed publication leaves the previous snapshot serving") {
  const testing::Fixture fx = testing::MakeFixture();
  SnapshotBundle next = fx.bundle;
  next.model = Refine(fx.bundle.model, fx.validation, 1, 0.01);
  for (PublishFault fault :
       {PublishFault::kPartialSnapshotWrite, PublishFault::kBeforeSnapshotRename,
        PublishFault::kBeforeRegistryRename}) {
    testing::TempDir dir("fault");
    {
      Store store(dir.path());
      store.PublishSnapshot(fx.bundle, {});
      store.InjectPublishFault(fault);
      CHECK_THROWS_AS(store.PublishSnapshot(next, {}), StorageError);
      CHECK(store.Registry().serving_snapshot_id == fx.bundle.snapshot_id());
    }
    Store reopened(dir.path());
    CHECK(reopened.LoadServing()->model == fx.bundle.model);
    CHECK(reopened.Registry().history.size() == 1);
    reopened.PublishSnapshot(next, {});
    CHECK(reopened.LoadServing()->model == next.model);
  }
}

TEST_CASE("verdict log enforces the step discipline") {
  testing::TempDir dir("verdicts");
  Store store(dir.path());
  store.AppendVerdict(Record("item-0", 0, 1));
  CHECK_THROWS_AS(store.AppendVerdict(Record("item-1", 3, 3)), StateError);
  CHECK_THROWS_AS(store.AppendVerdict(Record("item-0", 0, 2)), StateError);
  store.AppendVerdict(Record("item-2", 1, 4, false));
  CHECK_THROWS_AS(store.AppendVerdict(Record("item-3", 1, 3)), StateError);
  const auto records = store.ReadVerdicts();
  REQUIRE(records.size() == 2);
  CHECK(records[1] == Record("item-2", 1, 4, false));
}

TEST_CASE("a torn trailing verdict line is ignored") {
  testing::TempDir dir("torn");
  {
    Store store(dir.path());
    store.AppendVerdict(Record("item-0", 0, 1));
    store.AppendVerdict(Record("item-1", 1, 2));
  }
  std::ofstream(dir.path() / "verdicts.log", std::ios::app)
      << R"({"verdict":{"item_id":"item-2")";
  Store reopened(dir.path());
  CHECK(reopened.ReadVerdicts().size() == 2);
  CHECK_THROWS_AS(reopened.AppendVerdict(Record("item-1", 1, 3)), StateError);
}

TEST_CASE("critic replay from the log is bit-identical") {
  testing::TempDir dir("replay");
  const testing::Fixture fx = testing::MakeFixture();
  testing::CriticRunOptions options;
  options.max_human_verdicts = 150;
  options.train_every = 1000;
  const testing::CriticRun run = testing::RunScriptedCritic(fx, options);
  {
    Store store(dir.path());
    for (const VerdictRecord& r : run.records) store.AppendVerdict(r);
  }
  Store reopened(dir.path());
  CHECK(reopened.ReadVerdicts() == run.records);
  const AdaptiveCritic replayed = reopened.ReplayCritic(5, CriticConfig());
  CHECK(replayed == run.critic);
  CHECK(replayed.net().weights() == run.critic.net().weights());
}

TEST_CASE("review items keep their latest state") {
  testing::TempDir dir("items");
  ReviewQueue q;
  for (int i = 0; i < 3; ++i) {
    q.Emit({});
    q.Advance();
  }
  {
    Store store(dir.path());
    for (const ReviewItem& item : q.items()) store.SaveItem(item);
    ReviewItem judged = q.Get("item-00000001");
    judged.state = ReviewState::kHumanJudged;
    store.SaveItem(judged);
  }
  Store reopened(dir.path());
  const ReviewQueue back = reopened.LoadQueue();
  CHECK(back.size() == 3);
  CHECK(back.step() == 3);
  CHECK(back.Get("item-00000001").state == ReviewState::kHumanJudged);
  CHECK(back.next_sequence() == 3);
}

TEST_CASE("records encode and decode losslessly") {
  const testing::Fixture fx = testing::MakeFixture();
  const Attribution a =
      ClassifyFeatures(fx.bundle.model, fx.validation[3].features);
  CHECK(AttributionFromJson(AttributionToJson(a)) == a);
  const VerdictRecord r = Record("item-9", 2, 5, false);
  CHECK(VerdictRecordFromJson(VerdictRecordToJson(r)) == r);
  const EvaluationRecord e = Evaluate(fx.bundle.model, fx.validation);
  const EvaluationRecord back = EvaluationFromJson(EvaluationToJson(e, true));
  CHECK(back.accuracy == e.accuracy);
  CHECK(back.score_error == e.score_error);
  CHECK(back.selection_error == e.selection_error);
  CHECK(ParseSplit(SplitName(Split::kValidation)) == Split::kValidation);
  CHECK_THROWS_AS(ParseSplit("test"), DomainError);
}

TEST_CASE("atomic writes replace whole files") {
  testing::TempDir dir("atomic");
  const fs::path p = dir.path() / "f.txt";
  AtomicWrite(p, "first");
  AtomicWrite(p, "second");
  CHECK(ReadFile(p) == "second");
  for (const auto& e : fs::directory_iterator(dir.path())) {
    CHECK(e.path().filename() == "f.txt");
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace authorid
