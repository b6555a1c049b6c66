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

#include "authorid/snapshot.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "authorid/errors.h"

namespace authorid {

using nlohmann::json;

namespace {

json MatrixToJson(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd MatrixFromJson(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw DomainError("matrix data does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index jj = 0; jj < cols; ++jj) m(i, jj) = data[k++].get<double>();
  }
  return m;
}

json VectorToJson(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd VectorFromJson(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

json KernelToJson(const KernelSpec& k) {
  return {{"kind", KernelKindName(k.kind())},
          {"spread", k.spread()},
          {"dimension", k.dimension()},
          {"bandwidth_c", k.schedule().c},
          {"bandwidth_alpha", k.schedule().alpha}};
}

KernelSpec KernelFromJson(const json& j) {
  return KernelSpec(ParseKernelKind(j.at("kind").get<std::string>()),
                    j.at("spread").get<double>(), j.at("dimension").get<int>(),
                    {j.at("bandwidth_c").get<double>(),
                     j.at("bandwidth_alpha").get<double>()});
}

}  // namespace

std::optional<AuthorId> SnapshotBundle::FindAuthor(
    const std::string& name) const {
  for (std::size_t i = 0; i < author_names.size(); ++i) {
    if (author_names[i] == name) return static_cast<AuthorId>(i);
  }
  AuthorId index = -1;
  const char* end = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(name.data(), end, index);
  if (ec == std::errc() && ptr == end && index >= 0 &&
      index < model.n_authors()) {
    return index;
  }
  return std::nullopt;
}

json ModelToJson(const RbpnnModel& model) {
  return {{"snapshot_id", model.snapshot_id()},
          {"n_features", model.n_features()},
          {"n_samples", model.n_samples()},
          {"n_authors", model.n_authors()},
          {"centroids", MatrixToJson(model.centroids())},
          {"labels", model.labels()},
          {"beta", model.beta()},
          {"summation_weights", MatrixToJson(model.summation_weights())},
          {"selector_weights", VectorToJson(model.selector_weights())},
          {"kernel", KernelToJson(model.kernel())},
          {"lexicon_version", model.lexicon_version()}};
}

RbpnnModel ModelFromJson(const json& j) {
  RbpnnModel::Parts parts;
  parts.centroids = MatrixFromJson(j.at("centroids"));
  parts.labels = j.at("labels").get<std::vector<AuthorId>>();
  parts.beta = j.at("beta").get<double>();
  parts.summation_weights = MatrixFromJson(j.at("summation_weights"));
  parts.selector_weights = VectorFromJson(j.at("selector_weights"));
  parts.kernel = KernelFromJson(j.at("kernel"));
  parts.lexicon_version = j.at("lexicon_version").get<std::uint64_t>();
  RbpnnModel model = RbpnnModel::FromParts(std::move(parts));
  if (j.at("n_features").get<int>() != model.n_features() ||
      j.at("n_samples").get<int>() != model.n_samples() ||
      j.at("n_authors").get<int>() != model.n_authors()) {
    throw DomainError("snapshot sizes do not match its matrices");
  }
  if (j.contains("snapshot_id") &&
      j.at("snapshot_id").get<std::string>() != model.snapshot_id()) {
    throw DomainError("snapshot id does not match its content");
  }
  return model;
}

json LexiconToJson(const GroupLexicon& lexicon) {
  json dictionary = json::object();
  for (const auto& [word, group] : lexicon.SortedDictionary()) {
    dictionary[word] = group;
  }
  return {{"version", lexicon.version()},
          {"groups", lexicon.group_names()},
          {"dictionary", std::move(dictionary)}};
}

GroupLexicon LexiconFromJson(const json& j) {
  std::map<std::string, GroupId> dictionary;
  for (const auto& [word, group] : j.at("dictionary").items()) {
    dictionary.emplace(word, group.get<GroupId>());
  }
  return GroupLexicon::Restore(j.at("groups").get<std::vector<std::string>>(),
                               dictionary, j.at("version").get<std::uint64_t>());
}

json BundleToJson(const SnapshotBundle& bundle) {
  return {{"format", "authorid-snapshot"},
          {"format_version", kSnapshotFormatVersion},
          {"model", ModelToJson(bundle.model)},
          {"lexicon", LexiconToJson(bundle.lexicon)},
          {"authors", bundle.author_names}};
}

SnapshotBundle BundleFromJson(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "authorid-snapshot") {
      throw DomainError("not a snapshot document");
    }
    if (j.at("format_version").get<int>() != kSnapshotFormatVersion) {
      throw DomainError("unsupported snapshot format version");
    }
    SnapshotBundle bundle{ModelFromJson(j.at("model")),
                          LexiconFromJson(j.at("lexicon")),
                          j.at("authors").get<std::vector<std::string>>()};
    if (bundle.lexicon.group_count() != bundle.model.n_features()) {
      throw SnapshotIncompatibleError(
          "snapshot lexicon does not match the model's N_F");
    }
    if (static_cast<int>(bundle.author_names.size()) !=
        bundle.model.n_authors()) {
      throw DomainError("snapshot author names do not match N_G");
    }
    return bundle;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed snapshot: ") + e.what());
  }
}

std::string SerializeBundle(const SnapshotBundle& bundle) {
  return BundleToJson(bundle).dump() + "\n";
}

SnapshotBundle ParseBundle(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed snapshot: ") + e.what());
  }
  return BundleFromJson(j);
}

void SaveBundle(const SnapshotBundle& bundle,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path.string());
  out << SerializeBundle(bundle);
  out.close();
  if (!out) throw StorageError("write failed: " + path.string());
}

SnapshotBundle LoadBundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseBundle(buffer.str());
}

}  // namespace authorid
