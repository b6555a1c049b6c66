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

// Snapshot file: a JSON document holding a model, the lexicon it was trained
// against and the author names. Reals are written in shortest round-trip
// form, so save -> load reproduces every double bit for bit.

#ifndef AUTHORID_SNAPSHOT_H_
#define AUTHORID_SNAPSHOT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "authorid/lexicon.h"
#include "authorid/rbpnn.h"

namespace authorid {

inline constexpr int kSnapshotFormatVersion = 1;

struct SnapshotBundle {
  RbpnnModel model;
  GroupLexicon lexicon;
  std::vector<std::string> author_names;  // indexed by AuthorId

  const std::string& snapshot_id() const { return model.snapshot_id(); }

  // Index of `name`, or of a decimal author index; nullopt otherwise.
  std::optional<AuthorId> FindAuthor(const std::string& name) const;
};

nlohmann::json ModelToJson(const RbpnnModel& model);
RbpnnModel ModelFromJson(const nlohmann::json& j);

nlohmann::json LexiconToJson(const GroupLexicon& lexicon);
GroupLexicon LexiconFromJson(const nlohmann::json& j);

nlohmann::json BundleToJson(const SnapshotBundle& bundle);
SnapshotBundle BundleFromJson(const nlohmann::json& j);

std::string SerializeBundle(const SnapshotBundle& bundle);
SnapshotBundle ParseBundle(const std::string& text);

// Plain write/read; atomic publication lives in the store.
void SaveBundle(const SnapshotBundle& bundle, const std::filesystem::path& path);
SnapshotBundle LoadBundle(const std::filesystem::path& path);

}  // namespace authorid

#endif  // AUTHORID_SNAPSHOT_H_
