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

#include "authorid/synthetic.h"

#include <cmath>
#include <cstdio>

#include "authorid/errors.h"

namespace authorid {
namespace {

// Two lowercase letters encoding 0..675.
std::string Letters(int index) {
  return {static_cast<char>('a' + (index / 26) % 26),
          static_cast<char>('a' + index % 26)};
}

std::string GroupWord(int group, int word) {
  return "w" + Letters(group) + Letters(word);
}

std::string FillerWord(int index) { return "zq" + Letters(index); }

constexpr int kFillerVocabulary = 40;

std::vector<double> Dirichlet(int n, double alpha, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) total += (x = gamma(rng));
  for (double& x : p) x /= total;
  return p;
}

}  // namespace

SyntheticCorpus GenerateCorpus(const SyntheticConfig& config) {
  if (config.n_authors < 2 || config.n_groups < 1 ||
      config.words_per_group < 1 || config.texts_per_author < 1 ||
      config.tokens_per_text < 1) {
    throw DomainError("invalid synthetic corpus configuration");
  }
  if (config.n_groups > 676 || config.words_per_group > 676) {
    throw DomainError("synthetic corpus supports at most 676 groups/words");
  }
  SyntheticCorpus corpus;
  corpus.config = config;
  for (int g = 0; g < config.n_groups; ++g) {
    char name[24];
    std::snprintf(name, sizeof(name), "group%02d", g);
    for (int w = 0; w < config.words_per_group; ++w) {
      corpus.lexicon.AddWord(GroupWord(g, w), name);
    }
  }

  std::mt19937_64 rng(config.seed);
  const std::vector<double> shared =
      Dirichlet(config.n_groups, config.dirichlet_alpha, rng);
  for (int a = 0; a < config.n_authors; ++a) {
    char name[24];
    std::snprintf(name, sizeof(name), "author%02d", a);
    corpus.author_names.push_back(name);
    std::vector<double> own =
        Dirichlet(config.n_groups, config.dirichlet_alpha, rng);
    for (int g = 0; g < config.n_groups; ++g) {
      own[g] = config.shared_weight * shared[g] +
               (1.0 - config.shared_weight) * own[g];
    }
    corpus.group_distributions.push_back(std::move(own));
  }
  for (int a = 0; a < config.n_authors; ++a) {
    for (int t = 0; t < config.texts_per_author; ++t) {
      char id[32];
      std::snprintf(id, sizeof(id), "a%02d-t%03d", a, t);
      corpus.texts.push_back({id, GenerateText(corpus, a, rng), a});
    }
  }
  return corpus;
}

std::string GenerateText(const SyntheticCorpus& corpus, AuthorId author,
                         std::mt19937_64& rng) {
  const SyntheticConfig& config = corpus.config;
  const std::vector<double>& p = corpus.group_distributions.at(author);
  std::discrete_distribution<int> group(p.begin(), p.end());
  std::uniform_int_distribution<int> word(0, config.words_per_group - 1);
  std::uniform_int_distribution<int> filler(0, kFillerVocabulary - 1);
  std::bernoulli_distribution is_filler(config.filler_rate);
  std::uniform_int_distribution<int> sentence(6, 14);

  std::string text;
  int until_break = sentence(rng);
  bool capitalize = true;
  for (int i = 0; i < config.tokens_per_text; ++i) {
    std::string token =
        is_filler(rng) ? FillerWord(filler(rng)) : GroupWord(group(rng), word(rng));
    if (capitalize) token[0] = static_cast<char>(token[0] - 'a' + 'A');
    capitalize = false;
    if (!text.empty()) text.push_back(' ');
    text += token;
    if (--until_break == 0) {
      text.push_back('.');
      capitalize = true;
      until_break = sentence(rng);
    }
  }
  text.push_back('\n');
  return text;
}

CorpusSplit SplitCorpus(const SyntheticCorpus& corpus, double train_fraction) {
  CorpusSplit split;
  std::vector<int> seen(corpus.config.n_authors, 0);
  const int per_author = corpus.config.texts_per_author;
  const int n_train =
      static_cast<int>(std::lround(train_fraction * per_author));
  for (const SyntheticText& t : corpus.texts) {
    (seen[t.author]++ < n_train ? split.train : split.validation).push_back(t);
  }
  return split;
}

std::vector<LabeledSample> FeaturizeTexts(const std::vector<SyntheticText>& texts,
                                          const GroupLexicon& lexicon) {
  std::vector<LabeledSample> out;
  out.reserve(texts.size());
  for (const SyntheticText& t : texts) {
    out.push_back({ExtractFeatures(t.text, lexicon), t.author});
  }
  return out;
}

}  // namespace authorid
