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

#include "authorid/records.h"

#include "authorid/errors.h"

namespace authorid {

using nlohmann::json;

namespace {

constexpr std::string_view kSplitNames[] = {"train", "validation",
                                            "unlabeled"};

template <typename T>
json Optional(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> OptionalFrom(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string_view SplitName(Split split) {
  return kSplitNames[static_cast<int>(split)];
}

Split ParseSplit(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (kSplitNames[i] == name) return static_cast<Split>(i);
  }
  throw DomainError("unknown split: " + std::string(name));
}

bool IsValidSampleId(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

json FeaturesToJson(const FeatureVector& f) {
  return {{"counts", f.counts},
          {"frequencies", f.frequencies},
          {"matched_total", f.matched_total},
          {"unmatched_total", f.unmatched_total}};
}

FeatureVector FeaturesFromJson(const json& j) {
  FeatureVector f;
  f.counts = j.at("counts").get<std::vector<std::int64_t>>();
  f.frequencies = j.at("frequencies").get<std::vector<double>>();
  f.matched_total = j.at("matched_total").get<std::int64_t>();
  f.unmatched_total = j.at("unmatched_total").get<std::int64_t>();
  if (f.frequencies.size() != f.counts.size()) {
    throw DomainError("feature vector counts and frequencies differ in size");
  }
  return f;
}

json AttributionToJson(const Attribution& a) {
  return {{"sample_id", a.sample_id},   {"scores", a.scores},
          {"weighted", a.weighted},     {"selected_author", a.selected_author},
          {"margin", a.margin},         {"no_evidence", a.no_evidence}};
}

Attribution AttributionFromJson(const json& j) {
  Attribution a;
  a.sample_id = j.at("sample_id").get<std::string>();
  a.scores = j.at("scores").get<std::vector<double>>();
  a.weighted = j.at("weighted").get<std::vector<double>>();
  a.selected_author = j.at("selected_author").get<AuthorId>();
  a.margin = j.at("margin").get<double>();
  a.no_evidence = j.at("no_evidence").get<bool>();
  return a;
}

json VerdictToJson(const Verdict& v) {
  return {{"item_id", v.item_id},
          {"source", VerdictSourceName(v.source)},
          {"accepted", v.accepted},
          {"true_author", Optional(v.true_author)},
          {"xi", v.xi}};
}

Verdict VerdictFromJson(const json& j) {
  Verdict v;
  v.item_id = j.at("item_id").get<std::string>();
  v.source = ParseVerdictSource(j.at("source").get<std::string>());
  v.accepted = j.at("accepted").get<bool>();
  v.true_author = OptionalFrom<AuthorId>(j, "true_author");
  v.xi = j.at("xi").get<std::vector<double>>();
  return v;
}

json VerdictRecordToJson(const VerdictRecord& r) {
  return {{"verdict", VerdictToJson(r.verdict)},
          {"attribution", AttributionToJson(r.attribution)},
          {"item_step", r.item_step},
          {"applied_step", r.applied_step},
          {"recorded_at", r.recorded_at}};
}

VerdictRecord VerdictRecordFromJson(const json& j) {
  return {VerdictFromJson(j.at("verdict")),
          AttributionFromJson(j.at("attribution")),
          j.at("item_step").get<std::uint64_t>(),
          j.at("applied_step").get<std::uint64_t>(),
          j.at("recorded_at").get<std::string>()};
}

json ReviewItemToJson(const ReviewItem& item) {
  return {{"item_id", item.item_id},
          {"sequence", item.sequence},
          {"emitted_step", item.emitted_step},
          {"sample_id", item.sample_id},
          {"text", item.text},
          {"snapshot_id", item.snapshot_id},
          {"attribution", AttributionToJson(item.attribution)},
          {"features", FeaturesToJson(item.features)},
          {"created_at", item.created_at},
          {"state", ReviewStateName(item.state)},
          {"route", RouteName(item.route)}};
}

ReviewItem ReviewItemFromJson(const json& j) {
  ReviewItem item;
  item.item_id = j.at("item_id").get<std::string>();
  item.sequence = j.at("sequence").get<std::uint64_t>();
  item.emitted_step = j.at("emitted_step").get<std::uint64_t>();
  item.sample_id = j.at("sample_id").get<std::string>();
  item.text = j.at("text").get<std::string>();
  item.snapshot_id = j.at("snapshot_id").get<std::string>();
  item.attribution = AttributionFromJson(j.at("attribution"));
  item.features = FeaturesFromJson(j.at("features"));
  item.created_at = j.at("created_at").get<std::string>();
  item.state = ParseReviewState(j.at("state").get<std::string>());
  item.route = ParseRoute(j.at("route").get<std::string>());
  return item;
}

json SampleMetaToJson(const TextSample& s) {
  return {{"sample_id", s.sample_id},
          {"author", Optional(s.author)},
          {"split", SplitName(s.split)},
          {"features", s.features ? FeaturesToJson(*s.features) : json(nullptr)},
          {"lexicon_version", s.lexicon_version},
          {"created_at", s.created_at},
          {"text_bytes", s.text.size()}};
}

TextSample SampleMetaFromJson(const json& j) {
  TextSample s;
  s.sample_id = j.at("sample_id").get<std::string>();
  s.author = OptionalFrom<std::string>(j, "author");
  s.split = ParseSplit(j.at("split").get<std::string>());
  if (j.contains("features") && !j.at("features").is_null()) {
    s.features = FeaturesFromJson(j.at("features"));
  }
  s.lexicon_version = j.at("lexicon_version").get<std::uint64_t>();
  s.created_at = j.at("created_at").get<std::string>();
  return s;
}

json EvaluationToJson(const EvaluationRecord& e, bool include_matrices) {
  json j = {{"sample_count", e.sample_count},
            {"accuracy", e.accuracy},
            {"missed_rate", e.missed_rate},
            {"false_positive_rate", e.false_positive_rate}};
  if (include_matrices) {
    j["score_error"] = e.score_error;
    j["selection_error"] = e.selection_error;
  }
  return j;
}

EvaluationRecord EvaluationFromJson(const json& j) {
  EvaluationRecord e;
  e.sample_count = j.at("sample_count").get<std::size_t>();
  e.accuracy = j.at("accuracy").get<double>();
  e.missed_rate = j.at("missed_rate").get<double>();
  e.false_positive_rate = j.at("false_positive_rate").get<double>();
  if (j.contains("score_error")) {
    e.score_error = j.at("score_error").get<std::vector<std::vector<double>>>();
    e.selection_error =
        j.at("selection_error").get<std::vector<std::vector<int>>>();
  }
  return e;
}

}  // namespace authorid
