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

#include "authorid/critic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "authorid/errors.h"

namespace authorid {
namespace {

template <typename E, std::size_t N>
E ParseName(std::string_view name, const std::string_view (&names)[N],
            const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<E>(i);
  }
  throw DomainError(std::string("unknown ") + what + ": " + std::string(name));
}

constexpr std::string_view kStateNames[] = {"pending", "human_judged",
                                            "critic_judged", "applied"};
constexpr std::string_view kRouteNames[] = {"ask_human", "adaptive_only"};
constexpr std::string_view kSourceNames[] = {"human", "adaptive"};

void ValidateConfig(const CriticConfig& c) {
  if (!(c.tau_accept > 0.0) || c.window < 1 || !(c.p_min > 0.0) ||
      c.p_min > 1.0 || !(c.decay > 0.0) || c.decay >= 1.0 ||
      !(c.recovery > 0.0) || !(c.low_agreement <= c.high_agreement) ||
      c.hidden_units < 1 || !(c.learning_rate > 0.0) ||
      !(c.init_scale > 0.0)) {
    throw DomainError("invalid critic configuration");
  }
}

DenseNet InitialNet(int n_authors, const CriticConfig& config) {
  if (n_authors < 2) throw DomainError("critic needs at least two authors");
  const int h = config.hidden_units;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd w1(h, n_authors + 2);
  Eigen::MatrixXd w2(n_authors, h + 1);
  for (Eigen::Index i = 0; i < w1.size(); ++i) {
    w1.data()[i] = config.init_scale * u(rng);
  }
  const double out_scale = 1.0 / std::sqrt(static_cast<double>(h));
  for (Eigen::Index i = 0; i < w2.size(); ++i) {
    w2.data()[i] = out_scale * u(rng);
  }
  return DenseNet({n_authors + 1, h, n_authors}, {std::move(w1), std::move(w2)},
                  Activation::kTanh, config.learning_rate);
}

}  // namespace

std::string_view ReviewStateName(ReviewState state) {
  return kStateNames[static_cast<int>(state)];
}
ReviewState ParseReviewState(std::string_view name) {
  return ParseName<ReviewState>(name, kStateNames, "review state");
}
std::string_view RouteName(Route route) {
  return kRouteNames[static_cast<int>(route)];
}
Route ParseRoute(std::string_view name) {
  return ParseName<Route>(name, kRouteNames, "route");
}
std::string_view VerdictSourceName(VerdictSource source) {
  return kSourceNames[static_cast<int>(source)];
}
VerdictSource ParseVerdictSource(std::string_view name) {
  return ParseName<VerdictSource>(name, kSourceNames, "verdict source");
}

std::vector<double> ComputeXi(const Attribution& attribution,
                              const VerdictInput& input) {
  const std::size_t n = attribution.scores.size();
  std::vector<double> xi(n, 0.0);
  if (input.accepted) return xi;
  if (!input.true_author) {
    throw DomainError("a rejection must name the true author");
  }
  const AuthorId t = *input.true_author;
  if (t < 0 || static_cast<std::size_t>(t) >= n) {
    throw DomainError("true author out of range");
  }
  for (std::size_t k = 0; k < n; ++k) {
    xi[k] = attribution.scores[k] - (static_cast<AuthorId>(k) == t ? 1.0 : 0.0);
  }
  return xi;
}

AdaptiveCritic::AdaptiveCritic(int n_authors, CriticConfig config)
    : AdaptiveCritic(InitialNet(n_authors, config), config) {}

AdaptiveCritic::AdaptiveCritic(DenseNet net, CriticConfig config)
    : net_(std::move(net)), config_(config) {
  ValidateConfig(config_);
  if (net_.output_size() < 2 || net_.input_size() != net_.output_size() + 1) {
    throw DomainError("critic net must map N_G + 1 inputs to N_G outputs");
  }
}

double AdaptiveCritic::agreement() const {
  if (window_.empty()) return 0.0;
  return static_cast<double>(std::count(window_.begin(), window_.end(), true)) /
         static_cast<double>(window_.size());
}

void AdaptiveCritic::RecordAgreement(bool agreed) {
  const auto m = static_cast<std::size_t>(config_.window);
  window_.push_back(agreed);
  if (window_.size() > m) window_.pop_front();
  ++paired_;
  if (++since_update_ < m || window_.size() < m) return;
  since_update_ = 0;
  ++updates_;
  const double a = agreement();
  if (a >= config_.high_agreement) {
    p_human_ = std::max(config_.p_min, p_human_ * config_.decay);
  } else if (a < config_.low_agreement) {
    p_human_ = std::min(1.0, p_human_ + config_.recovery);
  }
}

AdaptiveCritic AdaptiveCritic::WithNet(DenseNet net) const {
  if (net.layer_sizes() != net_.layer_sizes()) {
    throw DomainError("critic net shape cannot change");
  }
  AdaptiveCritic out = *this;
  out.net_ = std::move(net);
  return out;
}

bool AdaptiveCritic::operator==(const AdaptiveCritic& other) const {
  return net_ == other.net_ && window_ == other.window_ &&
         paired_ == other.paired_ && since_update_ == other.since_update_ &&
         updates_ == other.updates_ && p_human_ == other.p_human_;
}

Eigen::VectorXd CriticInput(const Attribution& attribution) {
  const auto n = static_cast<Eigen::Index>(attribution.scores.size());
  Eigen::VectorXd in(n + 1);
  for (Eigen::Index k = 0; k < n; ++k) in(k) = attribution.scores[k];
  in(n) = attribution.margin;
  return in;
}

namespace {

CriticPrediction PredictFrom(const AdaptiveCritic& critic,
                             const ForwardPass& pass) {
  const Eigen::VectorXd& out = pass.output();
  return {std::vector<double>(out.data(), out.data() + out.size()),
          out.norm() < critic.config().tau_accept};
}

void CheckWidth(const AdaptiveCritic& critic, const Attribution& a) {
  if (static_cast<int>(a.scores.size()) != critic.n_authors()) {
    throw SnapshotIncompatibleError("attribution width differs from critic N_G");
  }
}

}  // namespace

CriticPrediction CriticPredict(const AdaptiveCritic& critic,
                               const Attribution& attribution) {
  CheckWidth(critic, attribution);
  return PredictFrom(critic, Forward(critic.net(), CriticInput(attribution)));
}

AdaptiveCritic CriticLearn(const AdaptiveCritic& critic,
                           const Attribution& attribution,
                           const Verdict& human) {
  CheckWidth(critic, attribution);
  if (human.source != VerdictSource::kHuman) {
    throw DomainError("the adaptive critic learns from human verdicts only");
  }
  if (static_cast<int>(human.xi.size()) != critic.n_authors()) {
    throw DomainError("xi width differs from critic N_G");
  }
  const Eigen::VectorXd input = CriticInput(attribution);
  const ForwardPass pass = Forward(critic.net(), input);
  const CriticPrediction before = PredictFrom(critic, pass);
  const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(
      human.xi.data(), static_cast<Eigen::Index>(human.xi.size()));
  AdaptiveCritic out = critic.WithNet(
      BackpropStep(critic.net(), input, pass.output() - target));
  out.RecordAgreement(before.would_accept == human.accepted);
  return out;
}

double UnitInterval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

Route RouteItem(const AdaptiveCritic& critic, std::mt19937_64& rng) {
  return UnitInterval(rng()) < critic.p_human() ? Route::kAskHuman
                                                : Route::kAdaptiveOnly;
}

bool ShouldRetrain(std::span<const Verdict> verdicts, std::size_t new_samples,
                   const GatePolicy& policy) {
  const bool rejected = std::any_of(verdicts.begin(), verdicts.end(),
                                    [](const Verdict& v) { return !v.accepted; });
  return rejected || new_samples >= policy.batch_threshold;
}

GateDecision Gate(std::span<const Verdict> verdicts, std::size_t new_samples,
                  const std::optional<EvaluationRecord>& candidate_eval,
                  const EvaluationRecord& serving_eval,
                  const GatePolicy& policy) {
  GateDecision d;
  d.retrain = ShouldRetrain(verdicts, new_samples, policy);
  if (!d.retrain) {
    d.reason = "no rejections and fewer than " +
               std::to_string(policy.batch_threshold) + " new samples";
    return d;
  }
  if (!candidate_eval) {
    throw DomainError("retraining is due but no candidate was evaluated");
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "candidate accuracy %.4f %s serving %.4f",
                candidate_eval->accuracy,
                candidate_eval->accuracy >= serving_eval.accuracy ? ">=" : "<",
                serving_eval.accuracy);
  d.persist_candidate = candidate_eval->accuracy >= serving_eval.accuracy;
  d.reason = std::string(d.persist_candidate ? "persist: " : "discard: ") + buf;
  return d;
}

const ReviewItem& ReviewQueue::Emit(ReviewItem item) {
  char id[32];
  std::snprintf(id, sizeof(id), "item-%08llu",
                static_cast<unsigned long long>(next_sequence_));
  item.item_id = id;
  item.sequence = next_sequence_++;
  item.emitted_step = step_;
  item.state = ReviewState::kPending;
  index_.emplace(item.item_id, items_.size());
  items_.push_back(std::move(item));
  return items_.back();
}

const ReviewItem* ReviewQueue::Find(std::string_view item_id) const {
  auto it = index_.find(std::string(item_id));
  return it == index_.end() ? nullptr : &items_[it->second];
}

const ReviewItem& ReviewQueue::Get(std::string_view item_id) const {
  const ReviewItem* item = Find(item_id);
  if (item == nullptr) {
    throw NotFoundError("unknown review item " + std::string(item_id));
  }
  return *item;
}

ReviewItem& ReviewQueue::Mutable(std::string_view item_id) {
  return const_cast<ReviewItem&>(Get(item_id));
}

const ReviewItem& ReviewQueue::MarkJudged(std::string_view item_id,
                                          VerdictSource source) {
  ReviewItem& item = Mutable(item_id);
  if (item.state != ReviewState::kPending) {
    throw StateError("review item " + item.item_id + " is already " +
                     std::string(ReviewStateName(item.state)));
  }
  if (item.emitted_step >= step_) {
    throw StateError("review item " + item.item_id +
                     " was emitted in the current step");
  }
  item.state = source == VerdictSource::kHuman ? ReviewState::kHumanJudged
                                               : ReviewState::kCriticJudged;
  return item;
}

void ReviewQueue::MarkApplied(std::string_view item_id) {
  ReviewItem& item = Mutable(item_id);
  if (item.state != ReviewState::kHumanJudged &&
      item.state != ReviewState::kCriticJudged) {
    throw StateError("review item " + item.item_id + " is not judged");
  }
  item.state = ReviewState::kApplied;
}

std::vector<ReviewItem> ReviewQueue::List(std::optional<ReviewState> state,
                                          std::uint64_t from_sequence,
                                          std::size_t limit) const {
  std::vector<ReviewItem> out;
  auto it = std::lower_bound(
      items_.begin(), items_.end(), from_sequence,
      [](const ReviewItem& item, std::uint64_t s) { return item.sequence < s; });
  for (; it != items_.end() && out.size() < limit; ++it) {
    if (!state || it->state == *state) out.push_back(*it);
  }
  return out;
}

ReviewQueue ReviewQueue::Restore(std::vector<ReviewItem> items,
                                 std::uint64_t step) {
  ReviewQueue q;
  q.step_ = step;
  for (ReviewItem& item : items) {
    if (!q.items_.empty() && item.sequence <= q.items_.back().sequence) {
      throw DomainError("review items are not in FIFO order");
    }
    if (item.emitted_step > step) {
      throw DomainError("review item emitted after the current step");
    }
    if (!q.index_.emplace(item.item_id, q.items_.size()).second) {
      throw DuplicateError("duplicate review item " + item.item_id);
    }
    q.next_sequence_ = item.sequence + 1;
    q.items_.push_back(std::move(item));
  }
  return q;
}

AdaptiveCritic ReplayCritic(int n_authors, const CriticConfig& config,
                            std::span<const VerdictRecord> records) {
  AdaptiveCritic critic(n_authors, config);
  for (const VerdictRecord& r : records) {
    if (r.verdict.source == VerdictSource::kHuman) {
      critic = CriticLearn(critic, r.attribution, r.verdict);
    }
  }
  return critic;
}

}  // namespace authorid
