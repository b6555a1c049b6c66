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

// Single-directory persistence. Layout under the root:
//
//   samples/index.jsonl       one {"sample_id"} line per stored sample
//   samples/<id>.txt          raw UTF-8 text, byte-exact
//   samples/<id>.json         sidecar metadata (author, split, features)
//   groups.tsv                group database
//   fallbacks/*.tsv           fallback lexica, consulted in name order
//   snapshots/<id>.json       immutable model bundles
//   registry.json             serving snapshot id and publication history
//   review/items.jsonl        review item states; the last line per id wins
//   verdicts.log              append-only verdict records
//
// Whole files are replaced by writing a temporary file and renaming it over
// the target, so readers see either the old or the new content.

#ifndef AUTHORID_STORE_H_
#define AUTHORID_STORE_H_

#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "authorid/critic.h"
#include "authorid/records.h"
#include "authorid/snapshot.h"

namespace authorid {

struct SnapshotEntry {
  std::string snapshot_id;
  std::string created_at;
  EvaluationRecord eval;  // summary fields only
  std::uint64_t lexicon_version = 0;
};

struct SnapshotRegistry {
  std::optional<std::string> serving_snapshot_id;
  std::vector<SnapshotEntry> history;  // publication order
};

// Points at which PublishSnapshot can be made to fail in tests.
enum class PublishFault {
  kNone,
  kPartialSnapshotWrite,  // half of the snapshot bytes, then failure
  kBeforeSnapshotRename,
  kBeforeRegistryRename,
};

class Store {
 public:
  // Creates the directory tree when missing and loads the indexes.
  explicit Store(std::filesystem::path root);

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const std::filesystem::path& root() const { return root_; }

  // DuplicateError on a known id, DomainError on an invalid id, an empty
  // text or a labeled split without author.
  void PutSample(const TextSample& sample);
  TextSample GetSample(const std::string& sample_id) const;
  bool HasSample(const std::string& sample_id) const;
  std::vector<TextSample> ListSamples(std::optional<Split> split = {}) const;
  std::size_t SampleCount() const;

  void SaveGroups(const GroupLexicon& lexicon);
  std::optional<GroupLexicon> LoadGroups() const;
  std::vector<FallbackLexicon> LoadFallbacks() const;

  // Writes the bundle, then swaps the registry to serve it. On failure the
  // previous registry stays in force.
  std::string PublishSnapshot(const SnapshotBundle& bundle,
                              const EvaluationRecord& eval);
  SnapshotRegistry Registry() const;
  SnapshotBundle LoadSnapshot(const std::string& snapshot_id) const;
  std::optional<SnapshotBundle> LoadServing() const;
  void InjectPublishFault(PublishFault fault) { fault_ = fault; }

  // Rejects records whose item was not emitted before the step they are
  // applied in, records applied before the previous one, and a second
  // record for the same item.
  void AppendVerdict(const VerdictRecord& record);
  std::vector<VerdictRecord> ReadVerdicts() const;
  AdaptiveCritic ReplayCritic(int n_authors, const CriticConfig& config) const;

  void SaveItem(const ReviewItem& item);
  // Current state of every item in FIFO order; the queue step resumes after
  // the last emission.
  ReviewQueue LoadQueue() const;

 private:
  std::filesystem::path SamplePath(const std::string& id,
                                   const char* ext) const;

  std::filesystem::path root_;

  mutable std::mutex samples_mu_;
  std::vector<std::string> sample_order_;
  std::unordered_map<std::string, std::size_t> sample_index_;

  mutable std::mutex snapshots_mu_;
  PublishFault fault_ = PublishFault::kNone;

  mutable std::mutex verdicts_mu_;
  std::set<std::string> judged_items_;
  std::uint64_t last_applied_step_ = 0;

  mutable std::mutex items_mu_;
};

// Writes `content` to `path` through a temporary file and a rename.
void AtomicWrite(const std::filesystem::path& path, const std::string& content);

}  // namespace authorid

#endif  // AUTHORID_STORE_H_
