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

// Seeded synthetic corpora: each author is a multinomial over word groups
// (a Dirichlet draw mixed with a shared base distribution), texts are i.i.d.
// word draws from it plus out-of-lexicon filler words.

#ifndef AUTHORID_SYNTHETIC_H_
#define AUTHORID_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "authorid/lexicon.h"
#include "authorid/rbpnn.h"

namespace authorid {

struct SyntheticConfig {
  int n_authors = 5;
  int n_groups = 20;
  int words_per_group = 8;
  int texts_per_author = 60;
  int tokens_per_text = 300;
  double dirichlet_alpha = 1.0;
  // Weight of the distribution shared by all authors; higher is harder.
  double shared_weight = 0.75;
  // Probability that a token is a filler word outside the lexicon.
  double filler_rate = 0.1;
  std::uint64_t seed = 7;
};

struct SyntheticText {
  std::string sample_id;
  std::string text;
  AuthorId author = 0;
};

struct SyntheticCorpus {
  SyntheticConfig config;
  GroupLexicon lexicon;
  std::vector<std::string> author_names;
  std::vector<std::vector<double>> group_distributions;  // per author
  std::vector<SyntheticText> texts;  // author-major order
};

SyntheticCorpus GenerateCorpus(const SyntheticConfig& config);

// A fresh text from `author`'s distribution.
std::string GenerateText(const SyntheticCorpus& corpus, AuthorId author,
                         std::mt19937_64& rng);

struct CorpusSplit {
  std::vector<SyntheticText> train;
  std::vector<SyntheticText> validation;
};

// Per author, the first round(train_fraction * n) texts go to training.
CorpusSplit SplitCorpus(const SyntheticCorpus& corpus, double train_fraction);

// Featurizes against a read-only lexicon.
std::vector<LabeledSample> FeaturizeTexts(const std::vector<SyntheticText>& texts,
                                          const GroupLexicon& lexicon);

}  // namespace authorid

#endif  // AUTHORID_SYNTHETIC_H_
