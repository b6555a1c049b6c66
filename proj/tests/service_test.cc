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

#include <thread>

#include "doctest.h"

#include "authorid/errors.h"
#include "authorid/service.h"
#include "support/oracles.h"

#include "httplib.h"

namespace authorid {
namespace {

using nlohmann::json;

ApiResponse Call(Api& api, const std::string& method, const std::string& path,
                 const json& body = json::object(),
                 std::map<std::string, std::string> query = {}) {
  return api.Handle({method, path, std::move(query), body.dump()});
}

ServiceConfig FixedClock() {
  ServiceConfig c;
  c.clock = [] { return std::string("2026-05-06T07:08:09Z"); };
  c.loop.critic.seed = 3;
  return c;
}

// A store holding a small corpus: 12 train and 4 validation texts for each
// of three authors.
struct Corpus {
  testing::TempDir dir{"service"};
  SyntheticCorpus corpus;

  Corpus() {
    SyntheticConfig config;
    config.n_authors = 3;
    config.texts_per_author = 16;
    config.tokens_per_text = 400;
    corpus = GenerateCorpus(config);
    Store store(dir.path());
    store.SaveGroups(corpus.lexicon);
  }

  void Ingest(Api& api) const {
    int n = 0;
    for (const SyntheticText& t : corpus.texts) {
      const bool validation = n++ % 16 >= 12;
      const ApiResponse r = Call(
          api, "POST", "/v1/texts",
          {{"text", t.text},
           {"author", corpus.author_names[t.author]},
           {"split", validation ? "validation" : "train"},
           {"sample_id", t.sample_id}});
      REQUIRE(r.status == 201);
    }
  }
};

std::string ErrorCode(const ApiResponse& r) {
  return r.body.at("error").at("code").get<std::string>();
}

TEST_SUITE("service") {

TEST_CASE("unknown routes and malformed bodies") {
  Corpus c;
  Store store(c.dir.path());
  Api api(store, FixedClock());
  CHECK(Call(api, "GET", "/v1/nothing").status == 404);
  CHECK(ErrorCode(Call(api, "DELETE", "/v1/texts")) == "not_found");
  const ApiResponse bad = api.Handle({"POST", "/v1/texts", {}, "{oops"});
  CHECK(bad.status == 400);
  CHECK(ErrorCode(bad) == "bad_request");
  CHECK(bad.body["error"]["message"].is_string());
  CHECK(Call(api, "POST", "/v1/texts", json::array()).status == 400);
}

TEST_CASE("ingesting texts") {
  Corpus c;
  Store store(c.dir.path());
  Api api(store, FixedClock());
  const ApiResponse r = Call(api, "POST", "/v1/texts",
                             {{"text", "Waaaa waaab zqaa."}, {"author", "x"}});
  REQUIRE(r.status == 201);
  CHECK(r.body["split"] == "train");
  CHECK(r.body["author"] == "x");
  CHECK(r.body["sample_id"] == "s000001");
  CHECK(r.body["created_at"] == "2026-05-06T07:08:09Z");
  CHECK(r.body["unmatched_total"] == 1);
  const ApiResponse unlabeled = Call(api, "POST", "/v1/texts", {{"text", "hi"}});
  CHECK(unlabeled.body["split"] == "unlabeled");
  CHECK(Call(api, "POST", "/v1/texts", {{"text", ""}}).status == 400);
  CHECK(Call(api, "POST", "/v1/texts", {{"text", 3}}).status == 400);
  CHECK(Call(api, "POST", "/v1/texts", {{"text", "a"}, {"split", "train"}})
            .status == 400);
  CHECK(Call(api, "POST", "/v1/texts", {{"text", "a"}, {"sample_id", "../x"}})
            .status == 400);
  const ApiResponse dup = Call(api, "POST", "/v1/texts",
                               {{"text", "a"}, {"sample_id", "s000001"}});
  CHECK(dup.status == 409);
  CHECK(ErrorCode(dup) == "conflict");
  CHECK(api.Handle({"POST", "/v1/texts", {}, "{\"text\":\"\xFF\"}"}).status ==
        400);
}

TEST_CASE("a store without groups cannot ingest") {
  testing::TempDir dir("nogroups");
  Store store(dir.path());
  Api api(store);
  CHECK(Call(api, "POST", "/v1/texts", {{"text", "a"}}).status == 409);
}

TEST_CASE("nothing is served before the first training") {
  Corpus c;
  Store store(c.dir.path());
  Api api(store, FixedClock());
  const ApiResponse s = Call(api, "GET", "/v1/model/status");
  CHECK(s.status == 200);
  CHECK(s.body["ready"] == false);
  CHECK(Call(api, "POST", "/v1/classify", {{"text", "x"}}).status == 409);
  CHECK(Call(api, "GET", "/v1/review/queue").status == 409);
  CHECK(Call(api, "POST", "/v1/train").status == 409);
}

TEST_CASE("full review cycle through the API") {
  Corpus c;
  Store store(c.dir.path());
  Api api(store, FixedClock());
  c.Ingest(api);

  const ApiResponse boot = Call(api, "POST", "/v1/train");
  REQUIRE(boot.status == 200);
  CHECK(boot.body["bootstrapped"] == true);
  const std::string snapshot = boot.body["serving_snapshot_id"];

  const ApiResponse status = Call(api, "GET", "/v1/model/status");
  CHECK(status.body["ready"] == true);
  CHECK(status.body["n_samples"] == 36);
  CHECK(status.body["n_features"] == 20);
  CHECK(status.body["n_authors"] == 3);
  CHECK(status.body["authors"] ==
        json::array({"author00", "author01", "author02"}));
  CHECK(status.body["p_human"] == 1.0);
  CHECK(status.body["last_eval"]["accuracy"].get<double>() >= 0.5);

  std::mt19937_64 rng(5);
  std::vector<std::pair<std::string, int>> items;
  for (int i = 0; i < 6; ++i) {
    const ApiResponse r = Call(api, "POST", "/v1/classify",
                               {{"text", GenerateText(c.corpus, i % 3, rng)},
                                {"sample_id", "q" + std::to_string(i)}});
    REQUIRE(r.status == 200);
    CHECK(r.body["state"] == "pending");
    CHECK(r.body["route"] == "ask_human");
    CHECK(r.body["snapshot_id"] == snapshot);
    CHECK(r.body["attribution"]["scores"].size() == 3);
    CHECK_FALSE(r.body.contains("warning"));
    items.emplace_back(r.body["item_id"], i % 3);
  }
  const ApiResponse empty = Call(api, "POST", "/v1/classify", {{"text", "..."}});
  CHECK(empty.body["warning"].is_string());
  CHECK(empty.body["attribution"]["no_evidence"] == true);

  const ApiResponse page =
      Call(api, "GET", "/v1/review/queue", {}, {{"limit", "4"}});
  REQUIRE(page.status == 200);
  CHECK(page.body["items"].size() == 4);
  CHECK(page.body["items"][0]["item_id"] == items[0].first);
  CHECK(page.body["items"][0]["text"].is_string());
  const std::string cursor = page.body["next_cursor"];
  const ApiResponse rest = Call(api, "GET", "/v1/review/queue", {},
                                {{"limit", "4"}, {"cursor", cursor}});
  CHECK(rest.body["items"].size() == 3);
  CHECK(rest.body["next_cursor"].is_null());
  CHECK(Call(api, "GET", "/v1/review/queue", {}, {{"limit", "0"}}).status == 400);
  CHECK(Call(api, "GET", "/v1/review/queue", {}, {{"cursor", "zz"}}).status == 400);
  CHECK(Call(api, "GET", "/v1/review/queue", {}, {{"state", "odd"}}).status == 400);

  const std::string first = items[0].first;
  const ApiResponse accept = Call(api, "POST", "/v1/review/" + first + "/verdict",
                                  {{"accepted", true}});
  REQUIRE(accept.status == 200);
  CHECK(accept.body["verdict"]["xi"] == json::array({0.0, 0.0, 0.0}));
  CHECK(accept.body["verdict"]["source"] == "human");
  CHECK(accept.body["item_state"] == "human_judged");
  CHECK(accept.body["p_human"] == 1.0);

  const ApiResponse again = Call(api, "POST", "/v1/review/" + first + "/verdict",
                                 {{"accepted", true}});
  CHECK(again.status == 409);
  CHECK(Call(api, "POST", "/v1/review/item-12345678/verdict", {{"accepted", true}})
            .status == 404);
  const std::string second = items[1].first;
  CHECK(Call(api, "POST", "/v1/review/" + second + "/verdict",
             {{"accepted", false}})
            .status == 400);
  CHECK(Call(api, "POST", "/v1/review/" + second + "/verdict",
             {{"accepted", false}, {"true_author", "nobody"}})
            .status == 400);
  CHECK(Call(api, "POST", "/v1/review/" + second + "/verdict", json::object())
            .status == 400);

  const ApiResponse reject =
      Call(api, "POST", "/v1/review/" + second + "/verdict",
           {{"accepted", false}, {"true_author", "author02"}});
  REQUIRE(reject.status == 200);
  CHECK(reject.body["verdict"]["true_author"] == 2);
  CHECK(reject.body["verdict"]["true_author_name"] == "author02");
  const json scores = page.body["items"][1]["attribution"]["scores"];
  for (int k = 0; k < 3; ++k) {
    CHECK(reject.body["verdict"]["xi"][k].get<double>() ==
          doctest::Approx(scores[k].get<double>() - (k == 2 ? 1.0 : 0.0)));
  }
  CHECK(Call(api, "GET", "/v1/review/queue").body["items"].size() == 5);

  const ApiResponse train = Call(api, "POST", "/v1/train", {{"epochs", 3}});
  REQUIRE(train.status == 200);
  CHECK(train.body["bootstrapped"] == false);
  CHECK(train.body["decision"]["retrain"] == true);
  CHECK(train.body["verdicts_considered"] == 2);
  CHECK(train.body["candidate_eval"]["accuracy"].is_number());
  const bool persisted = train.body["decision"]["persist_candidate"];
  CHECK(persisted == (train.body["candidate_eval"]["accuracy"].get<double>() >=
                      train.body["serving_eval"]["accuracy"].get<double>()));
  CHECK(Call(api, "GET", "/v1/review/queue", {}, {{"state", "applied"}})
            .body["items"]
            .size() == 2);
  CHECK(Call(api, "POST", "/v1/train", {{"epochs", 0}}).status == 400);

  const ApiResponse after = Call(api, "GET", "/v1/model/status");
  CHECK(after.body["train_cycles"] == 1);
  CHECK(after.body["open_verdicts"] == 0);
  CHECK(after.body["last_gate"]["reason"].is_string());
  CHECK(after.body["snapshot_history"] == (persisted ? 2 : 1));
  CHECK(after.body["persisted_candidates"] == (persisted ? 1 : 0));
}

TEST_CASE("a restarted service resumes the queue, critic and model") {
  Corpus c;
  json before;
  std::vector<std::string> ids;
  AdaptiveCritic critic(3);
  {
    Store store(c.dir.path());
    Api api(store, FixedClock());
    c.Ingest(api);
    Call(api, "POST", "/v1/train");
    std::mt19937_64 rng(8);
    for (int i = 0; i < 8; ++i) {
      ids.push_back(Call(api, "POST", "/v1/classify",
                         {{"text", GenerateText(c.corpus, i % 3, rng)}})
                        .body["item_id"]);
    }
    for (int i = 0; i < 5; ++i) {
      Call(api, "POST", "/v1/review/" + ids[i] + "/verdict",
           {{"accepted", i % 2 == 0}, {"true_author", std::to_string(i % 3)}});
    }
    before = Call(api, "GET", "/v1/model/status").body;
    critic = api.loop()->critic();
  }
  Store store(c.dir.path());
  Api api(store, FixedClock());
  const json after = Call(api, "GET", "/v1/model/status").body;
  for (const char* key : {"serving_snapshot_id", "n_samples", "pending_items",
                          "open_verdicts", "step", "p_human", "agreement",
                          "paired_judgments"}) {
    CAPTURE(key);
    CHECK(after[key] == before[key]);
  }
  CHECK(api.loop()->critic() == critic);
  CHECK(Call(api, "POST", "/v1/review/" + ids[0] + "/verdict",
             {{"accepted", true}})
            .status == 409);
  CHECK(Call(api, "POST", "/v1/review/" + ids[6] + "/verdict",
             {{"accepted", true}})
            .status == 200);
  const json next = Call(api, "POST", "/v1/classify", {{"text", "waaaa"}}).body;
  CHECK(next["item_id"] == "item-00000008");
}

TEST_CASE("a grown lexicon is reported as snapshot_incompatible") {
  Corpus c;
  {
    std::filesystem::create_directories(c.dir.path() / "fallbacks");
    std::ofstream(c.dir.path() / "fallbacks" / "extra.tsv") << "novel\tzqaa\n";
  }
  Store store(c.dir.path());
  Api api(store, FixedClock());
  c.Ingest(api);
  // The fallback added a group while ingesting, so the model was built on
  // the grown lexicon; growing it once more breaks compatibility.
  Call(api, "POST", "/v1/train");
  std::ofstream(c.dir.path() / "fallbacks" / "more.tsv") << "later\tzqzz\n";
  Store reopened(c.dir.path());
  Api restarted(reopened, FixedClock());
  CHECK(Call(restarted, "POST", "/v1/texts", {{"text", "zqzz"}}).status == 201);
  const ApiResponse r = Call(restarted, "POST", "/v1/classify", {{"text", "waaaa"}});
  CHECK(r.status == 409);
  CHECK(ErrorCode(r) == "snapshot_incompatible");
}

TEST_CASE("the HTTP binding serves the same contract") {
  Corpus c;
  Store store(c.dir.path());
  Api api(store, FixedClock());
  HttpService http(api);
  const int port = http.Bind("127.0.0.1", 0);
  std::thread server([&] { http.Listen(); });
  httplib::Client client("127.0.0.1", port);
  auto status = client.Get("/v1/model/status");
  REQUIRE(status);
  CHECK(status->status == 200);
  CHECK(status->get_header_value("Content-Type") == "application/json");
  CHECK(json::parse(status->body)["ready"] == false);
  auto posted = client.Post("/v1/texts", R"({"text":"waaaa","author":"a"})",
                            "application/json");
  REQUIRE(posted);
  CHECK(posted->status == 201);
  auto missing = client.Get("/elsewhere");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["error"]["code"] == "not_found");
  auto queue = client.Get("/v1/review/queue?limit=abc");
  REQUIRE(queue);
  CHECK(queue->status == 409);
  http.Stop();
  server.join();
}

}  // TEST_SUITE

}  // namespace
}  // namespace authorid
