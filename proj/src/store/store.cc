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

#include "authorid/store.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "authorid/errors.h"
#include "authorid/loop.h"

namespace authorid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteBytes(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw StorageError("write failed: " + path.string());
}

void AppendLine(const fs::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw StorageError("cannot append to " + path.string());
  out << line << '\n';
  out.close();
  if (!out) throw StorageError("append failed: " + path.string());
}

// Complete lines of an append-only file. A trailing fragment without a
// newline is a torn append and is dropped.
std::vector<std::string> ReadLines(const fs::path& path) {
  std::vector<std::string> lines;
  if (!fs::exists(path)) return lines;
  const std::string content = ReadFile(path);
  std::size_t start = 0;
  for (std::size_t nl; (nl = content.find('\n', start)) != std::string::npos;
       start = nl + 1) {
    if (nl > start) lines.push_back(content.substr(start, nl - start));
  }
  return lines;
}

json ParseJson(const std::string& text, const fs::path& source) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw StorageError("corrupt record in " + source.string() + ": " +
                       e.what());
  }
}

json EntryToJson(const SnapshotEntry& e) {
  return {{"snapshot_id", e.snapshot_id},
          {"created_at", e.created_at},
          {"eval", EvaluationToJson(e.eval)},
          {"lexicon_version", e.lexicon_version}};
}

SnapshotEntry EntryFromJson(const json& j) {
  return {j.at("snapshot_id").get<std::string>(),
          j.at("created_at").get<std::string>(),
          EvaluationFromJson(j.at("eval")),
          j.at("lexicon_version").get<std::uint64_t>()};
}

}  // namespace

void AtomicWrite(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  WriteBytes(tmp, content);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StorageError("rename failed: " + path.string());
}

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  for (const char* dir : {"samples", "snapshots", "review", "fallbacks"}) {
    fs::create_directories(root_ / dir, ec);
    if (ec) throw StorageError("cannot create " + (root_ / dir).string());
  }
  for (const std::string& line : ReadLines(root_ / "samples" / "index.jsonl")) {
    const auto id = ParseJson(line, "samples/index.jsonl")
                        .at("sample_id")
                        .get<std::string>();
    if (sample_index_.emplace(id, sample_order_.size()).second) {
      sample_order_.push_back(id);
    }
  }
  for (const VerdictRecord& r : ReadVerdicts()) {
    judged_items_.insert(r.verdict.item_id);
    last_applied_step_ = std::max(last_applied_step_, r.applied_step);
  }
}

fs::path Store::SamplePath(const std::string& id, const char* ext) const {
  return root_ / "samples" / (id + ext);
}

void Store::PutSample(const TextSample& sample) {
  if (!IsValidSampleId(sample.sample_id)) {
    throw DomainError("invalid sample id '" + sample.sample_id + "'");
  }
  if (sample.text.empty()) throw DomainError("sample text is empty");
  if (sample.split != Split::kUnlabeled &&
      (!sample.author || sample.author->empty())) {
    throw DomainError("train and validation samples need an author");
  }
  std::lock_guard lock(samples_mu_);
  if (sample_index_.count(sample.sample_id) != 0) {
    throw DuplicateError("sample " + sample.sample_id + " already exists");
  }
  AtomicWrite(SamplePath(sample.sample_id, ".txt"), sample.text);
  AtomicWrite(SamplePath(sample.sample_id, ".json"),
              SampleMetaToJson(sample).dump() + "\n");
  AppendLine(root_ / "samples" / "index.jsonl",
             json{{"sample_id", sample.sample_id}}.dump());
  sample_index_.emplace(sample.sample_id, sample_order_.size());
  sample_order_.push_back(sample.sample_id);
}

TextSample Store::GetSample(const std::string& sample_id) const {
  if (!HasSample(sample_id)) {
    throw NotFoundError("unknown sample " + sample_id);
  }
  const fs::path meta = SamplePath(sample_id, ".json");
  TextSample s;
  try {
    s = SampleMetaFromJson(ParseJson(ReadFile(meta), meta));
  } catch (const json::exception& e) {
    throw StorageError("corrupt sidecar " + meta.string() + ": " + e.what());
  }
  s.text = ReadFile(SamplePath(sample_id, ".txt"));
  return s;
}

bool Store::HasSample(const std::string& sample_id) const {
  std::lock_guard lock(samples_mu_);
  return sample_index_.count(sample_id) != 0;
}

std::size_t Store::SampleCount() const {
  std::lock_guard lock(samples_mu_);
  return sample_order_.size();
}

std::vector<TextSample> Store::ListSamples(std::optional<Split> split) const {
  std::vector<std::string> ids;
  {
    std::lock_guard lock(samples_mu_);
    ids = sample_order_;
  }
  std::vector<TextSample> out;
  for (const std::string& id : ids) {
    TextSample s = GetSample(id);
    if (!split || s.split == *split) out.push_back(std::move(s));
  }
  return out;
}

void Store::SaveGroups(const GroupLexicon& lexicon) {
  std::ostringstream out;
  WriteGroupDb(lexicon, out);
  AtomicWrite(root_ / "groups.tsv", out.str());
}

std::optional<GroupLexicon> Store::LoadGroups() const {
  const fs::path path = root_ / "groups.tsv";
  if (!fs::exists(path)) return std::nullopt;
  return LoadGroupDb(path);
}

std::vector<FallbackLexicon> Store::LoadFallbacks() const {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(root_ / "fallbacks")) {
    if (entry.is_regular_file() && entry.path().extension() == ".tsv") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<FallbackLexicon> out;
  for (const fs::path& p : paths) out.push_back(LoadFallback(p));
  return out;
}

std::string Store::PublishSnapshot(const SnapshotBundle& bundle,
                                   const EvaluationRecord& eval) {
  std::lock_guard lock(snapshots_mu_);
  const std::string id = bundle.snapshot_id();
  const fs::path path = root_ / "snapshots" / (id + ".json");
  if (!fs::exists(path)) {
    const std::string content = SerializeBundle(bundle);
    fs::path tmp = path;
    tmp += ".tmp";
    if (fault_ == PublishFault::kPartialSnapshotWrite) {
      WriteBytes(tmp, std::string_view(content).substr(0, content.size() / 2));
      throw StorageError("injected fault: partial snapshot write");
    }
    WriteBytes(tmp, content);
    if (fault_ == PublishFault::kBeforeSnapshotRename) {
      throw StorageError("injected fault: before snapshot rename");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw StorageError("rename failed: " + path.string());
  }

  SnapshotRegistry registry = Registry();
  registry.serving_snapshot_id = id;
  EvaluationRecord summary = eval;
  summary.score_error.clear();
  summary.selection_error.clear();
  registry.history.push_back(
      {id, UtcNow(), std::move(summary), bundle.lexicon.version()});
  json history = json::array();
  for (const SnapshotEntry& e : registry.history) {
    history.push_back(EntryToJson(e));
  }
  const std::string content =
      json{{"serving_snapshot_id", id}, {"history", std::move(history)}}
          .dump(2) +
      "\n";
  if (fault_ == PublishFault::kBeforeRegistryRename) {
    fs::path tmp = root_ / "registry.json.tmp";
    WriteBytes(tmp, content);
    throw StorageError("injected fault: before registry rename");
  }
  AtomicWrite(root_ / "registry.json", content);
  return id;
}

SnapshotRegistry Store::Registry() const {
  SnapshotRegistry registry;
  const fs::path path = root_ / "registry.json";
  if (!fs::exists(path)) return registry;
  try {
    const json j = ParseJson(ReadFile(path), path);
    if (!j.at("serving_snapshot_id").is_null()) {
      registry.serving_snapshot_id =
          j.at("serving_snapshot_id").get<std::string>();
    }
    for (const json& e : j.at("history")) {
      registry.history.push_back(EntryFromJson(e));
    }
  } catch (const json::exception& e) {
    throw StorageError("corrupt registry: " + std::string(e.what()));
  }
  return registry;
}

SnapshotBundle Store::LoadSnapshot(const std::string& snapshot_id) const {
  const fs::path path = root_ / "snapshots" / (snapshot_id + ".json");
  if (!IsValidSampleId(snapshot_id) || !fs::exists(path)) {
    throw NotFoundError("unknown snapshot " + snapshot_id);
  }
  return LoadBundle(path);
}

std::optional<SnapshotBundle> Store::LoadServing() const {
  const SnapshotRegistry registry = Registry();
  if (!registry.serving_snapshot_id) return std::nullopt;
  return LoadSnapshot(*registry.serving_snapshot_id);
}

void Store::AppendVerdict(const VerdictRecord& record) {
  std::lock_guard lock(verdicts_mu_);
  if (record.item_step >= record.applied_step) {
    throw StateError("verdict for " + record.verdict.item_id +
                     " does not reference an earlier step");
  }
  if (record.applied_step < last_applied_step_) {
    throw StateError("verdict for " + record.verdict.item_id +
                     " is out of order");
  }
  if (judged_items_.count(record.verdict.item_id) != 0) {
    throw StateError("item " + record.verdict.item_id + " already judged");
  }
  AppendLine(root_ / "verdicts.log", VerdictRecordToJson(record).dump());
  judged_items_.insert(record.verdict.item_id);
  last_applied_step_ = record.applied_step;
}

std::vector<VerdictRecord> Store::ReadVerdicts() const {
  const fs::path path = root_ / "verdicts.log";
  std::vector<VerdictRecord> out;
  for (const std::string& line : ReadLines(path)) {
    try {
      out.push_back(VerdictRecordFromJson(ParseJson(line, path)));
    } catch (const json::exception& e) {
      throw StorageError("corrupt verdict record: " + std::string(e.what()));
    }
  }
  return out;
}

AdaptiveCritic Store::ReplayCritic(int n_authors,
                                   const CriticConfig& config) const {
  const std::vector<VerdictRecord> records = ReadVerdicts();
  return authorid::ReplayCritic(n_authors, config, records);
}

void Store::SaveItem(const ReviewItem& item) {
  std::lock_guard lock(items_mu_);
  AppendLine(root_ / "review" / "items.jsonl", ReviewItemToJson(item).dump());
}

ReviewQueue Store::LoadQueue() const {
  std::lock_guard lock(items_mu_);
  const fs::path path = root_ / "review" / "items.jsonl";
  std::map<std::uint64_t, ReviewItem> latest;
  std::uint64_t step = 0;
  for (const std::string& line : ReadLines(path)) {
    ReviewItem item;
    try {
      item = ReviewItemFromJson(ParseJson(line, path));
    } catch (const json::exception& e) {
      throw StorageError("corrupt review item: " + std::string(e.what()));
    }
    step = std::max(step, item.emitted_step + 1);
    latest[item.sequence] = std::move(item);
  }
  std::vector<ReviewItem> items;
  items.reserve(latest.size());
  for (auto& [sequence, item] : latest) items.push_back(std::move(item));
  return ReviewQueue::Restore(std::move(items), step);
}

}  // namespace authorid
