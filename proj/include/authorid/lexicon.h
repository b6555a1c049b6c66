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

// Word-group lexicon and the text -> group-count feature pipeline.
//
// A GroupLexicon maps normalized words to dense group ids. Texts are
// tokenized, every distinct word is looked up once (first in the lexicon,
// then in fallback lexica in order), and all of its occurrences are credited
// to the group it resolves to. Words found only in a fallback are added to
// the lexicon when counting in ingest mode.

#ifndef AUTHORID_LEXICON_H_
#define AUTHORID_LEXICON_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace authorid {

using GroupId = int;

class GroupLexicon {
 public:
  GroupLexicon() = default;

  // Rebuilds a lexicon from its parts (e.g. a stored snapshot). Group ids
  // follow `group_names`; throws DomainError on dangling ids or a version
  // too small to account for the contents.
  static GroupLexicon Restore(std::vector<std::string> group_names,
                              const std::map<std::string, GroupId>& dictionary,
                              std::uint64_t version);

  int group_count() const { return static_cast<int>(group_names_.size()); }
  std::size_t word_count() const { return dictionary_.size(); }
  std::uint64_t version() const { return version_; }

  const std::vector<std::string>& group_names() const { return group_names_; }
  const std::string& group_name(GroupId id) const;
  std::optional<GroupId> FindGroup(std::string_view group_name) const;

  // Group of an already-normalized word.
  std::optional<GroupId> Lookup(std::string_view word) const;

  // Adds `word` (normalized here) to `group_name`, creating the group if
  // needed. Re-adding a word to its current group is a no-op; adding it to
  // a different group throws ConflictError.
  GroupId AddWord(std::string_view word, const std::string& group_name);

  // Dictionary in deterministic (word-sorted) order.
  std::map<std::string, GroupId> SortedDictionary() const;

  bool operator==(const GroupLexicon& other) const = default;

 private:
  GroupId AddGroup(const std::string& group_name);

  std::vector<std::string> group_names_;
  std::unordered_map<std::string, GroupId> group_index_;
  std::unordered_map<std::string, GroupId> dictionary_;
  std::uint64_t version_ = 0;
};

// Secondary word source consulted when the lexicon misses a word.
struct FallbackLexicon {
  std::string name;
  std::unordered_map<std::string, std::string> entries;  // word -> group

  const std::string* Find(std::string_view word) const;
};

struct TokenizedText {
  std::string sample_id;
  std::vector<std::string> tokens;
  // Letter/apostrophe runs seen before dropping those that were only
  // apostrophes.
  std::size_t raw_length = 0;
};

struct FeatureVector {
  std::vector<std::int64_t> counts;
  std::vector<double> frequencies;
  std::int64_t matched_total = 0;
  // Tokens that resolved to no group anywhere; not part of counts.
  std::int64_t unmatched_total = 0;

  std::size_t size() const { return counts.size(); }
  bool operator==(const FeatureVector& other) const = default;
};

// Lower-cases and maps typographic apostrophes to '\''. Input must be valid
// UTF-8. Idempotent.
std::string NormalizeWord(std::string_view word);

// Lower-case fold, split on every code point that is neither a letter nor an
// apostrophe, strip leading/trailing apostrophes, drop empty tokens. Throws
// EncodingError on invalid UTF-8.
TokenizedText Tokenize(std::string_view raw_text, std::string sample_id = "");

enum class LexiconMode {
  // The lexicon is never modified; fallback hits only count when their group
  // already exists.
  kReadOnly,
  // Fallback hits grow the lexicon (new words, new groups).
  kIngest,
};

struct CountResult {
  FeatureVector features;  // counts only; see Featurize
  GroupLexicon lexicon;
};

// Group occurrence counting over a token stream. The returned feature vector
// has one slot per group of the returned lexicon.
CountResult CountGroups(const TokenizedText& text, const GroupLexicon& lexicon,
                        std::span<const FallbackLexicon> fallbacks,
                        LexiconMode mode = LexiconMode::kIngest);

// Fills `frequencies` as counts / matched_total (all zeros when nothing
// matched).
FeatureVector Featurize(FeatureVector features);

// Tokenize + CountGroups(kReadOnly) + Featurize.
FeatureVector ExtractFeatures(std::string_view raw_text,
                              const GroupLexicon& lexicon);

// Group DB text format: one `<group_name>\t<word>` per line, group ids by
// first appearance, lines starting with '#' and blank lines ignored.
GroupLexicon ParseGroupDb(std::istream& in, const std::string& source);
GroupLexicon LoadGroupDb(const std::filesystem::path& path);
FallbackLexicon ParseFallback(std::istream& in, const std::string& name);
FallbackLexicon LoadFallback(const std::filesystem::path& path);

// Writes groups in id order so that parsing the output yields the same ids.
void WriteGroupDb(const GroupLexicon& lexicon, std::ostream& out);
void SaveGroupDb(const GroupLexicon& lexicon,
                 const std::filesystem::path& path);

}  // namespace authorid

#endif  // AUTHORID_LEXICON_H_
