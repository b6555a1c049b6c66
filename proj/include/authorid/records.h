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

// JSON forms of the records that cross the store and service boundaries.
// Reals use shortest round-trip formatting, so decode(encode(x)) == x.

#ifndef AUTHORID_RECORDS_H_
#define AUTHORID_RECORDS_H_

#include <optional>
#include <string>

#include "json.hpp"

#include "authorid/critic.h"
#include "authorid/lexicon.h"
#include "authorid/rbpnn.h"

namespace authorid {

enum class Split { kTrain, kValidation, kUnlabeled };

std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct TextSample {
  std::string sample_id;
  std::optional<std::string> author;  // required for train and validation
  std::string text;
  Split split = Split::kUnlabeled;
  // Cached features and the lexicon version they were computed against.
  std::optional<FeatureVector> features;
  std::uint64_t lexicon_version = 0;
  std::string created_at;

  bool operator==(const TextSample& other) const = default;
};

// Letters, digits, '.', '_' and '-', 1 to 128 bytes, not starting with '.'.
bool IsValidSampleId(std::string_view id);

nlohmann::json FeaturesToJson(const FeatureVector& f);
FeatureVector FeaturesFromJson(const nlohmann::json& j);

nlohmann::json AttributionToJson(const Attribution& a);
Attribution AttributionFromJson(const nlohmann::json& j);

nlohmann::json VerdictToJson(const Verdict& v);
Verdict VerdictFromJson(const nlohmann::json& j);

nlohmann::json VerdictRecordToJson(const VerdictRecord& r);
VerdictRecord VerdictRecordFromJson(const nlohmann::json& j);

nlohmann::json ReviewItemToJson(const ReviewItem& item);
ReviewItem ReviewItemFromJson(const nlohmann::json& j);

// Sidecar metadata: every field except the text.
nlohmann::json SampleMetaToJson(const TextSample& s);
TextSample SampleMetaFromJson(const nlohmann::json& j);

// Summary fields, plus the e matrices when `include_matrices`.
nlohmann::json EvaluationToJson(const EvaluationRecord& e,
                                bool include_matrices = false);
EvaluationRecord EvaluationFromJson(const nlohmann::json& j);

}  // namespace authorid

#endif  // AUTHORID_RECORDS_H_
