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

// Reference implementations written straight from the definitions, with no
// shared code paths, plus a scripted critic that drives the feedback loop.

#ifndef AUTHORID_TESTS_SUPPORT_ORACLES_H_
#define AUTHORID_TESTS_SUPPORT_ORACLES_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "authorid/lexicon.h"
#include "authorid/neural.h"
#include "authorid/loop.h"
#include "authorid/rbpnn.h"
#include "authorid/synthetic.h"

namespace authorid::testing {

// Pattern responses by explicit loops over coordinates.
std::vector<double> NaivePattern(const RbpnnModel& model,
                                 const std::vector<double>& v);
std::vector<double> NaiveSummation(const RbpnnModel& model,
                                   const std::vector<double>& x1);

// Mean absolute error over a grid on [-3, 3] of the default-kernel Parzen
// estimate from n standard normal draws, against the exact density.
double ParzenNormalError(std::int64_t n, std::uint64_t seed);

struct OracleCounts {
  std::vector<std::int64_t> counts;
  std::vector<std::string> group_names;
  std::map<std::string, std::string> dictionary;  // word -> group name
  std::int64_t matched = 0;
  std::int64_t unmatched = 0;
};

// Quadratic-time group counting: each token position is resolved by a
// linear search of the lexicon entries, then of each fallback in order.
OracleCounts BruteForceCount(
    const std::vector<std::string>& tokens,
    const std::vector<std::string>& group_names,
    const std::vector<std::pair<std::string, std::string>>& lexicon_entries,
    const std::vector<std::vector<std::pair<std::string, std::string>>>&
        fallbacks,
    bool ingest);

// Random training set with `n_f` features, `n_g` authors and `n_s` samples
// (every author present).
std::vector<LabeledSample> RandomTrainingSet(int n_f, int n_g, int n_s,
                                             std::mt19937_64& rng);

// Standard five-author corpus and a model fitted on its training split.
struct Fixture {
  SyntheticCorpus corpus;
  CorpusSplit split;
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> validation;
  SnapshotBundle bundle;
};
Fixture MakeFixture(SyntheticConfig config = {}, double train_fraction = 0.75);

std::vector<HeldOutText> HeldOutTexts(const Fixture& fixture);

// Accept iff the margin exceeds 0.3; reject with the true author otherwise.
inline constexpr double kHumanMarginRule = 0.3;

struct CriticRun {
  int human_verdicts = 0;
  int emitted = 0;
  // 1-based human verdict count at which the first full window reached
  // 0.95 agreement; -1 if it never did.
  int first_high_window = -1;
  int first_p_below = -1;  // verdict count at which p_human < 0.2
  double best_window_agreement = 0.0;
  double final_agreement = 0.0;
  double final_p_human = 1.0;
  int cycles = 0;
  int persisted = 0;
  // Persisted candidates whose held-out accuracy is below the serving one.
  int gate_violations = 0;
  std::vector<VerdictRecord> records;
  AdaptiveCritic critic{2};
};

struct CriticRunOptions {
  int max_human_verdicts = 2000;
  int max_emitted = 20000;
  int train_every = 200;
  int epochs = 5;
  double step = 0.05;
  std::uint64_t seed = 7;
};

// Streams fresh texts through a loop, judges the previous step's item
// whenever it is routed to the human, and trains every `train_every`
// emissions.
CriticRun RunScriptedCritic(const Fixture& fixture,
                            const CriticRunOptions& options);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Runs a shell command, returning its exit status and captured stdout.
struct CommandResult {
  int status = -1;
  std::string out;
};
CommandResult RunCommand(const std::string& command);

}  // namespace authorid::testing

#endif  // AUTHORID_TESTS_SUPPORT_ORACLES_H_
