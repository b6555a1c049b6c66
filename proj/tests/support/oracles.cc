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

#include "support/oracles.h"

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>

#include "authorid/errors.h"

namespace authorid::testing {

namespace {

double ClosedFormProfile(const KernelSpec& k, double r) {
  switch (k.kind()) {
    case KernelKind::kGaussian:
      return std::exp(-r * r / 2.0);
    case KernelKind::kExponentialPnn:
      return std::exp(-r * r / (2.0 * k.spread() * k.spread()));
    case KernelKind::kBox:
      return r <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

const std::string* Linear(
    const std::vector<std::pair<std::string, std::string>>& entries,
    const std::string& word) {
  for (const auto& [w, g] : entries) {
    if (w == word) return &g;
  }
  return nullptr;
}

}  // namespace

double ParzenNormalError(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd samples(n, 1);
  for (std::int64_t i = 0; i < n; ++i) samples(i, 0) = normal(rng);
  const KernelSpec spec;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double err = 0.0;
  int points = 0;
  for (int i = -12; i <= 12; ++i, ++points) {
    const double x = 0.25 * i;
    Eigen::VectorXd v(1);
    v << x;
    err += std::abs(ParzenEstimate(samples, v, n, spec) -
                    norm * std::exp(-0.5 * x * x));
  }
  return err / points;
}

std::vector<double> NaivePattern(const RbpnnModel& model,
                                 const std::vector<double>& v) {
  const Eigen::MatrixXd& c = model.centroids();
  std::vector<double> x1(c.rows());
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < c.cols(); ++i) {
      const double d = v[i] - c(j, i);
      sq += d * d;
    }
    x1[j] = ClosedFormProfile(model.kernel(), std::sqrt(sq) / model.beta());
  }
  return x1;
}

std::vector<double> NaiveSummation(const RbpnnModel& model,
                                   const std::vector<double>& x1) {
  const Eigen::MatrixXd& w = model.summation_weights();
  std::vector<double> x2(w.cols(), 0.0);
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    for (Eigen::Index j = 0; j < w.rows(); ++j) x2[k] += w(j, k) * x1[j];
  }
  return x2;
}

OracleCounts BruteForceCount(
    const std::vector<std::string>& tokens,
    const std::vector<std::string>& group_names,
    const std::vector<std::pair<std::string, std::string>>& lexicon_entries,
    const std::vector<std::vector<std::pair<std::string, std::string>>>&
        fallbacks,
    bool ingest) {
  OracleCounts out;
  out.group_names = group_names;
  std::vector<std::pair<std::string, std::string>> entries = lexicon_entries;

  // Resolution per position; a repeated word reuses its first resolution.
  std::vector<std::optional<std::string>> resolved(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::size_t first = i;
    for (std::size_t k = 0; k < i; ++k) {
      if (tokens[k] == tokens[i]) {
        first = k;
        break;
      }
    }
    if (first < i) {
      resolved[i] = resolved[first];
      continue;
    }
    if (const std::string* g = Linear(entries, tokens[i])) {
      resolved[i] = *g;
      continue;
    }
    for (const auto& fallback : fallbacks) {
      const std::string* g = Linear(fallback, tokens[i]);
      if (g == nullptr) continue;
      const bool known = std::find(out.group_names.begin(),
                                   out.group_names.end(),
                                   *g) != out.group_names.end();
      if (ingest) {
        if (!known) out.group_names.push_back(*g);
        entries.emplace_back(tokens[i], *g);
        resolved[i] = *g;
      } else if (known) {
        resolved[i] = *g;
      }
      break;
    }
  }

  out.counts.assign(out.group_names.size(), 0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!resolved[i]) {
      ++out.unmatched;
      continue;
    }
    for (std::size_t g = 0; g < out.group_names.size(); ++g) {
      if (out.group_names[g] == *resolved[i]) ++out.counts[g];
    }
    ++out.matched;
  }
  for (const auto& [w, g] : entries) out.dictionary[w] = g;
  return out;
}

std::vector<LabeledSample> RandomTrainingSet(int n_f, int n_g, int n_s,
                                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> author(0, n_g - 1);
  std::vector<LabeledSample> out;
  for (int s = 0; s < n_s; ++s) {
    FeatureVector f;
    f.counts.assign(n_f, 0);
    f.frequencies.resize(n_f);
    double total = 0.0;
    for (int i = 0; i < n_f; ++i) total += (f.frequencies[i] = unit(rng));
    for (double& x : f.frequencies) x /= total;
    out.push_back({std::move(f), s < n_g ? s : author(rng)});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

Fixture MakeFixture(SyntheticConfig config, double train_fraction) {
  SyntheticCorpus corpus = GenerateCorpus(config);
  CorpusSplit split = SplitCorpus(corpus, train_fraction);
  std::vector<LabeledSample> train = FeaturizeTexts(split.train, corpus.lexicon);
  std::vector<LabeledSample> validation =
      FeaturizeTexts(split.validation, corpus.lexicon);
  RbpnnModel model = TrainOutputWeights(
      BuildModel(train, std::nullopt, KernelSpec(), config.n_authors,
                 corpus.lexicon.version()));
  SnapshotBundle bundle{std::move(model), corpus.lexicon, corpus.author_names};
  return {std::move(corpus), std::move(split), std::move(train),
          std::move(validation), std::move(bundle)};
}

std::vector<HeldOutText> HeldOutTexts(const Fixture& fixture) {
  std::vector<HeldOutText> out;
  for (const SyntheticText& t : fixture.split.validation) {
    out.push_back({t.text, t.author});
  }
  return out;
}

CriticRun RunScriptedCritic(const Fixture& fixture,
                            const CriticRunOptions& options) {
  CriticRun run;
  LoopConfig config;
  config.route_seed = options.seed;
  LoopHooks hooks;
  hooks.on_verdict = [&run](const VerdictRecord& r) {
    run.records.push_back(r);
  };
  hooks.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
  ReinforcementLoop loop(fixture.bundle, HeldOutTexts(fixture), config, hooks);

  const SyntheticCorpus& corpus = fixture.corpus;
  std::mt19937_64 rng(options.seed * 31 + 1);
  std::uniform_int_distribution<int> pick(0, corpus.config.n_authors - 1);
  std::optional<std::pair<std::string, AuthorId>> previous;
  while (run.human_verdicts < options.max_human_verdicts &&
         run.emitted < options.max_emitted) {
    const AuthorId author = pick(rng);
    ReviewItem item = loop.Emit("s" + std::to_string(run.emitted),
                                GenerateText(corpus, author, rng));
    ++run.emitted;
    if (previous) {
      const std::optional<ReviewItem> prior = loop.FindItem(previous->first);
      if (prior->state == ReviewState::kPending &&
          prior->route == Route::kAskHuman) {
        const bool accept = prior->attribution.margin > kHumanMarginRule;
        const JudgeOutcome o =
            loop.JudgeHuman(previous->first, {accept, previous->second});
        ++run.human_verdicts;
        const AdaptiveCritic critic = loop.critic();
        if (critic.agreement_window().size() ==
            static_cast<std::size_t>(critic.config().window)) {
          run.best_window_agreement =
              std::max(run.best_window_agreement, critic.agreement());
          if (critic.agreement() >= 0.95 && run.first_high_window < 0) {
            run.first_high_window = run.human_verdicts;
          }
        }
        if (o.p_human < 0.2 && run.first_p_below < 0) {
          run.first_p_below = run.human_verdicts;
        }
      }
    }
    previous = {{item.item_id, author}};
    if (run.emitted % options.train_every == 0) {
      const TrainOutcome t = loop.Train(options.epochs, options.step);
      ++run.cycles;
      if (t.decision.persist_candidate) {
        ++run.persisted;
        if (t.candidate_eval->accuracy < t.serving_eval.accuracy) {
          ++run.gate_violations;
        }
      }
    }
  }
  run.critic = loop.critic();
  run.final_agreement = run.critic.agreement();
  run.final_p_human = run.critic.p_human();
  return run;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device device;
  path_ = std::filesystem::temp_directory_path() /
          ("authorid-" + tag + "-" + std::to_string(device()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

CommandResult RunCommand(const std::string& command) {
  CommandResult result;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(command.c_str(), "r"),
                                             pclose);
  if (!pipe) return result;
  char buffer[4096];
  std::size_t n;
  while ((n = std::fread(buffer, 1, sizeof(buffer), pipe.get())) > 0) {
    result.out.append(buffer, n);
  }
  const int raw = pclose(pipe.release());
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

}  // namespace authorid::testing
