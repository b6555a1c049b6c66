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

#include "authorid/lexicon.h"

#include <algorithm>
#include <fstream>

#include "authorid/errors.h"
#include "lexicon/utf8.h"

namespace authorid {

const std::string& GroupLexicon::group_name(GroupId id) const {
  if (id < 0 || id >= group_count()) {
    throw DomainError("group id " + std::to_string(id) + " out of range");
  }
  return group_names_[id];
}

std::optional<GroupId> GroupLexicon::FindGroup(
    std::string_view group_name) const {
  auto it = group_index_.find(std::string(group_name));
  if (it == group_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<GroupId> GroupLexicon::Lookup(std::string_view word) const {
  auto it = dictionary_.find(std::string(word));
  if (it == dictionary_.end()) return std::nullopt;
  return it->second;
}

GroupId GroupLexicon::AddGroup(const std::string& group_name) {
  if (group_name.empty()) throw DomainError("empty group name");
  if (group_name.find_first_of("\t\n\r") != std::string::npos) {
    throw DomainError("group name contains a tab or line break");
  }
  if (auto existing = FindGroup(group_name)) return *existing;
  const GroupId id = group_count();
  group_names_.push_back(group_name);
  group_index_.emplace(group_name, id);
  ++version_;
  return id;
}

GroupId GroupLexicon::AddWord(std::string_view word,
                              const std::string& group_name) {
  std::string key = NormalizeWord(word);
  if (key.empty()) throw DomainError("empty word");
  auto it = dictionary_.find(key);
  if (it != dictionary_.end()) {
    if (group_names_[it->second] != group_name) {
      throw ConflictError("word '" + key + "' is in group '" +
                          group_names_[it->second] + "', not '" + group_name +
                          "'");
    }
    return it->second;
  }
  const GroupId id = AddGroup(group_name);
  dictionary_.emplace(std::move(key), id);
  ++version_;
  return id;
}

GroupLexicon GroupLexicon::Restore(
    std::vector<std::string> group_names,
    const std::map<std::string, GroupId>& dictionary, std::uint64_t version) {
  GroupLexicon lexicon;
  for (const std::string& name : group_names) {
    if (lexicon.FindGroup(name)) {
      throw DomainError("duplicate group name '" + name + "'");
    }
    lexicon.AddGroup(name);
  }
  for (const auto& [word, group] : dictionary) {
    if (group < 0 || group >= lexicon.group_count()) {
      throw DomainError("word '" + word + "' references a missing group");
    }
    if (NormalizeWord(word) != word) {
      throw DomainError("word '" + word + "' is not normalized");
    }
    lexicon.dictionary_.emplace(word, group);
  }
  const std::uint64_t minimum = lexicon.group_count() + dictionary.size();
  if (version < minimum) {
    throw DomainError("lexicon version " + std::to_string(version) +
                      " is below its content count");
  }
  lexicon.version_ = version;
  return lexicon;
}

std::map<std::string, GroupId> GroupLexicon::SortedDictionary() const {
  return {dictionary_.begin(), dictionary_.end()};
}

const std::string* FallbackLexicon::Find(std::string_view word) const {
  auto it = entries.find(std::string(word));
  return it == entries.end() ? nullptr : &it->second;
}

std::string NormalizeWord(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  utf8::Decoder decoder(word);
  while (auto cp = decoder.Next()) {
    utf8::Append(utf8::IsApostrophe(*cp) ? U'\'' : utf8::ToLower(*cp), out);
  }
  return out;
}

TokenizedText Tokenize(std::string_view raw_text, std::string sample_id) {
  TokenizedText result;
  result.sample_id = std::move(sample_id);
  std::string current;
  auto flush = [&result, &current]() {
    if (current.empty()) return;
    ++result.raw_length;
    const auto first = current.find_first_not_of('\'');
    if (first != std::string::npos) {
      const auto last = current.find_last_not_of('\'');
      result.tokens.push_back(current.substr(first, last - first + 1));
    }
    current.clear();
  };
  utf8::Decoder decoder(raw_text);
  while (auto cp = decoder.Next()) {
    if (utf8::IsApostrophe(*cp)) {
      current.push_back('\'');
    } else if (utf8::IsLetter(*cp)) {
      utf8::Append(utf8::ToLower(*cp), current);
    } else {
      flush();
    }
  }
  flush();
  return result;
}

CountResult CountGroups(const TokenizedText& text, const GroupLexicon& lexicon,
                        std::span<const FallbackLexicon> fallbacks,
                        LexiconMode mode) {
  if (lexicon.group_count() < 1) {
    throw DomainError("lexicon has no groups");
  }
  CountResult result{{}, lexicon};
  GroupLexicon& groups = result.lexicon;

  // Each distinct word is resolved once, at its first occurrence, and all of
  // its occurrences are consumed together. Grouping occurrences up front is
  // the same scan in linear time.
  std::vector<std::string_view> order;
  std::unordered_map<std::string_view, std::int64_t> occurrences;
  for (const std::string& token : text.tokens) {
    auto [it, inserted] = occurrences.try_emplace(token, 0);
    if (inserted) order.push_back(token);
    ++it->second;
  }

  std::vector<std::pair<GroupId, std::int64_t>> credited;
  std::int64_t unmatched = 0;
  for (std::string_view word : order) {
    const std::int64_t n = occurrences[word];
    std::optional<GroupId> group = groups.Lookup(word);
    if (!group) {
      for (const FallbackLexicon& fallback : fallbacks) {
        const std::string* name = fallback.Find(word);
        if (name == nullptr) continue;
        if (mode == LexiconMode::kIngest) {
          group = groups.AddWord(word, *name);
        } else {
          group = groups.FindGroup(*name);
        }
        break;
      }
    }
    if (group) {
      credited.emplace_back(*group, n);
    } else {
      unmatched += n;
    }
  }

  FeatureVector& features = result.features;
  features.counts.assign(groups.group_count(), 0);
  for (const auto& [group, n] : credited) {
    features.counts[group] += n;
    features.matched_total += n;
  }
  features.unmatched_total = unmatched;
  return result;
}

FeatureVector Featurize(FeatureVector features) {
  features.frequencies.assign(features.counts.size(), 0.0);
  if (features.matched_total > 0) {
    const double total = static_cast<double>(features.matched_total);
    for (std::size_t i = 0; i < features.counts.size(); ++i) {
      features.frequencies[i] = static_cast<double>(features.counts[i]) / total;
    }
  }
  return features;
}

FeatureVector ExtractFeatures(std::string_view raw_text,
                              const GroupLexicon& lexicon) {
  CountResult counted =
      CountGroups(Tokenize(raw_text), lexicon, {}, LexiconMode::kReadOnly);
  return Featurize(std::move(counted.features));
}

namespace {

// Calls `emit(line_number, group, word)` for every data line.
template <typename Emit>
void ParseLines(std::istream& in, const std::string& source, Emit emit) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(source, line_number, "expected <group>\\t<word>");
    }
    std::string group = line.substr(0, tab);
    std::string word = line.substr(tab + 1);
    if (group.empty()) throw ParseError(source, line_number, "empty group");
    if (word.find('\t') != std::string::npos) {
      throw ParseError(source, line_number, "more than one tab");
    }
    if (!utf8::IsValid(group) || !utf8::IsValid(word)) {
      throw ParseError(source, line_number, "invalid UTF-8");
    }
    TokenizedText tokens = Tokenize(word);
    if (tokens.tokens.size() != 1 || tokens.tokens[0] != NormalizeWord(word)) {
      throw ParseError(source, line_number,
                       "word must be a single token: '" + word + "'");
    }
    emit(line_number, std::move(group), std::move(tokens.tokens[0]));
  }
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open " + path.string());
  return in;
}

}  // namespace

GroupLexicon ParseGroupDb(std::istream& in, const std::string& source) {
  GroupLexicon lexicon;
  ParseLines(in, source,
             [&](std::size_t line, std::string group, std::string word) {
               try {
                 lexicon.AddWord(word, group);
               } catch (const ConflictError& e) {
                 throw ConflictError(source + ":" + std::to_string(line) +
                                     ": " + e.what());
               }
             });
  if (lexicon.group_count() == 0) {
    throw ParseError(source, 0, "no groups");
  }
  return lexicon;
}

GroupLexicon LoadGroupDb(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseGroupDb(in, path.string());
}

FallbackLexicon ParseFallback(std::istream& in, const std::string& name) {
  FallbackLexicon fallback{name, {}};
  ParseLines(in, name,
             [&](std::size_t line, std::string group, std::string word) {
               auto [it, inserted] = fallback.entries.try_emplace(word, group);
               if (!inserted && it->second != group) {
                 throw ConflictError(name + ":" + std::to_string(line) +
                                     ": word '" + word + "' is in group '" +
                                     it->second + "', not '" + group + "'");
               }
             });
  if (fallback.entries.empty()) throw ParseError(name, 0, "no groups");
  return fallback;
}

FallbackLexicon LoadFallback(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseFallback(in, path.stem().string());
}

void WriteGroupDb(const GroupLexicon& lexicon, std::ostream& out) {
  std::vector<std::vector<std::string>> by_group(lexicon.group_count());
  for (const auto& [word, group] : lexicon.SortedDictionary()) {
    by_group[group].push_back(word);
  }
  for (GroupId g = 0; g < lexicon.group_count(); ++g) {
    for (const std::string& word : by_group[g]) {
      out << lexicon.group_name(g) << '\t' << word << '\n';
    }
  }
}

void SaveGroupDb(const GroupLexicon& lexicon,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path.string());
  WriteGroupDb(lexicon, out);
  if (!out) throw StorageError("write failed: " + path.string());
}

}  // namespace authorid
