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

// Reinforcement feedback on attributions.
//
// A human critic accepts or rejects each attribution; the error signal xi is
// zero on acceptance and (scores - onehot(true author)) on rejection. An
// adaptive critic, a small dense network fed with the scores and the
// margin, learns to predict xi from human verdicts and takes over routing as
// its agreement with the human grows. A gate decides whether the classifier
// is refined and whether the refined candidate replaces the serving model.

#ifndef AUTHORID_CRITIC_H_
#define AUTHORID_CRITIC_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "authorid/lexicon.h"
#include "authorid/neural.h"
#include "authorid/rbpnn.h"

namespace authorid {

enum class ReviewState { kPending, kHumanJudged, kCriticJudged, kApplied };
enum class Route { kAskHuman, kAdaptiveOnly };
enum class VerdictSource { kHuman, kAdaptive };

std::string_view ReviewStateName(ReviewState state);
ReviewState ParseReviewState(std::string_view name);
std::string_view RouteName(Route route);
Route ParseRoute(std::string_view name);
std::string_view VerdictSourceName(VerdictSource source);
VerdictSource ParseVerdictSource(std::string_view name);

struct ReviewItem {
  std::string item_id;
  std::uint64_t sequence = 0;      // FIFO position
  std::uint64_t emitted_step = 0;  // step at which the attribution was made
  std::string sample_id;
  std::string text;
  std::string snapshot_id;
  Attribution attribution;
  FeatureVector features;
  std::string created_at;  // UTC ISO-8601
  ReviewState state = ReviewState::kPending;
  Route route = Route::kAskHuman;
};

struct VerdictInput {
  bool accepted = true;
  std::optional<AuthorId> true_author;  // required when rejected
};

struct Verdict {
  std::string item_id;
  VerdictSource source = VerdictSource::kHuman;
  bool accepted = true;
  std::optional<AuthorId> true_author;
  std::vector<double> xi;

  bool operator==(const Verdict& other) const = default;
};

// Zero on acceptance, scores - onehot(true_author) on rejection. Throws
// DomainError when a rejection has no (or an out-of-range) true author.
std::vector<double> ComputeXi(const Attribution& attribution,
                              const VerdictInput& input);

struct CriticConfig {
  // Adaptive acceptance: |predicted xi|_2 < tau_accept.
  double tau_accept = 0.25;
  // Agreement window length M; autonomy is updated once per M paired
  // judgments.
  int window = 50;
  double p_min = 0.05;
  double decay = 0.9;       // p_human *= decay when agreement >= high
  double recovery = 0.2;    // p_human += recovery when agreement < low
  double high_agreement = 0.95;
  double low_agreement = 0.8;
  int hidden_units = 32;
  double learning_rate = 0.03;
  double init_scale = 1.0;  // input layer; the output layer uses 1/sqrt(hidden)
  std::uint64_t seed = 1;
};

struct CriticPrediction {
  std::vector<double> xi_hat;
  bool would_accept = true;
};

class AdaptiveCritic {
 public:
  AdaptiveCritic(int n_authors, CriticConfig config = {});
  AdaptiveCritic(DenseNet net, CriticConfig config);

  const DenseNet& net() const { return net_; }
  const CriticConfig& config() const { return config_; }
  int n_authors() const { return net_.output_size(); }
  double p_human() const { return p_human_; }

  // Recent (adaptive would accept == human accepted) outcomes, oldest first.
  const std::deque<bool>& agreement_window() const { return window_; }
  // Share of agreements in the window; 0 when empty.
  double agreement() const;
  std::uint64_t paired_judgments() const { return paired_; }
  std::uint64_t autonomy_updates() const { return updates_; }

  // Records one paired judgment; every `window` pairs (once the window is
  // full) p_human is decayed or recovered by the agreement rule.
  void RecordAgreement(bool agreed);

  AdaptiveCritic WithNet(DenseNet net) const;

  bool operator==(const AdaptiveCritic& other) const;

 private:
  DenseNet net_;
  CriticConfig config_;
  std::deque<bool> window_;
  std::uint64_t paired_ = 0;
  std::uint64_t since_update_ = 0;
  std::uint64_t updates_ = 0;
  double p_human_ = 1.0;
};

// Network input: the normalized scores followed by the margin.
Eigen::VectorXd CriticInput(const Attribution& attribution);

CriticPrediction CriticPredict(const AdaptiveCritic& critic,
                               const Attribution& attribution);

// One backprop step towards `human.xi` using (prediction - xi) as the error,
// after recording whether the pre-step prediction agreed with the human.
AdaptiveCritic CriticLearn(const AdaptiveCritic& critic,
                           const Attribution& attribution,
                           const Verdict& human);

// Maps 64 random bits to [0, 1) the same way on every platform.
double UnitInterval(std::uint64_t bits);

// ask_human iff u < p_human, with u = UnitInterval(rng()).
Route RouteItem(const AdaptiveCritic& critic, std::mt19937_64& rng);

struct GatePolicy {
  // New labeled samples that trigger retraining without any rejection.
  std::size_t batch_threshold = 20;
};

struct GateDecision {
  bool retrain = false;
  bool persist_candidate = false;
  std::string reason;
};

bool ShouldRetrain(std::span<const Verdict> verdicts, std::size_t new_samples,
                   const GatePolicy& policy);

// retrain = any rejection or new_samples >= threshold; persist iff retrain
// and the candidate's held-out accuracy is at least the serving one's.
// `candidate_eval` is required whenever retraining is due.
GateDecision Gate(std::span<const Verdict> verdicts, std::size_t new_samples,
                  const std::optional<EvaluationRecord>& candidate_eval,
                  const EvaluationRecord& serving_eval,
                  const GatePolicy& policy = {});

// FIFO of emitted attributions awaiting judgment. Every emission happens at
// the current step; feedback is accepted only for items of earlier steps.
class ReviewQueue {
 public:
  std::uint64_t step() const { return step_; }
  std::uint64_t next_sequence() const { return next_sequence_; }
  std::size_t size() const { return items_.size(); }

  // Assigns item_id, sequence and emitted_step.
  const ReviewItem& Emit(ReviewItem item);
  // Moves to the next step (the one-step delay between output and feedback).
  void Advance() { ++step_; }

  const ReviewItem* Find(std::string_view item_id) const;
  const ReviewItem& Get(std::string_view item_id) const;

  // Throws NotFoundError for unknown ids, StateError when the item is not
  // pending or was emitted in the current step.
  const ReviewItem& MarkJudged(std::string_view item_id, VerdictSource source);
  void MarkApplied(std::string_view item_id);

  // Items in FIFO order with sequence >= from_sequence, optionally filtered.
  std::vector<ReviewItem> List(std::optional<ReviewState> state,
                               std::uint64_t from_sequence,
                               std::size_t limit) const;

  // Rebuilds a queue from persisted items.
  static ReviewQueue Restore(std::vector<ReviewItem> items, std::uint64_t step);
  const std::deque<ReviewItem>& items() const { return items_; }

 private:
  ReviewItem& Mutable(std::string_view item_id);

  std::deque<ReviewItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t step_ = 0;
  std::uint64_t next_sequence_ = 0;
};

// One line of the verdict log: the verdict, the attribution it judged and
// the steps of emission and application (item_step < applied_step).
struct VerdictRecord {
  Verdict verdict;
  Attribution attribution;
  std::uint64_t item_step = 0;
  std::uint64_t applied_step = 0;
  std::string recorded_at;

  bool operator==(const VerdictRecord& other) const = default;
};

// Fresh critic followed by CriticLearn on every human record, in order.
AdaptiveCritic ReplayCritic(int n_authors, const CriticConfig& config,
                            std::span<const VerdictRecord> records);

}  // namespace authorid

#endif  // AUTHORID_CRITIC_H_
