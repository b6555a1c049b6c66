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

#include "authorid/loop.h"

#include <ctime>
#include <utility>

#include "authorid/errors.h"

namespace authorid {

std::string FormatUtc(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string UtcNow() { return FormatUtc(std::chrono::system_clock::now()); }

ReinforcementLoop::ReinforcementLoop(SnapshotBundle serving,
                                     std::vector<HeldOutText> held_out,
                                     LoopConfig config, LoopHooks hooks,
                                     LoopState state)
    : held_out_(std::move(held_out)),
      config_(config),
      hooks_(std::move(hooks)),
      serving_(std::make_shared<const SnapshotBundle>(std::move(serving))),
      queue_(std::move(state.queue)),
      critic_(state.critic ? std::move(*state.critic)
                           : AdaptiveCritic(serving_->model.n_authors(),
                                            config.critic)),
      open_records_(std::move(state.open_records)),
      last_eval_(std::move(state.last_eval)) {
  if (held_out_.empty()) throw DomainError("the gate needs a held-out set");
  if (critic_.n_authors() != serving_->model.n_authors()) {
    throw SnapshotIncompatibleError("critic N_G differs from the model's");
  }
  for (const VerdictRecord& r : open_records_) queue_.Get(r.verdict.item_id);
}

std::shared_ptr<const SnapshotBundle> ReinforcementLoop::serving() const {
  std::lock_guard lock(serving_mu_);
  return serving_;
}

Route ReinforcementLoop::RouteFor(std::uint64_t sequence) const {
  std::mt19937_64 rng(config_.route_seed ^ (sequence * 0x9e3779b97f4a7c15ULL));
  return RouteItem(critic_, rng);
}

ReviewItem ReinforcementLoop::Emit(std::string sample_id,
                                   std::string_view text,
                                   const GroupLexicon* lexicon) {
  const std::shared_ptr<const SnapshotBundle> bundle = serving();
  if (lexicon == nullptr) lexicon = &bundle->lexicon;
  if (lexicon->group_count() != bundle->model.n_features()) {
    throw SnapshotIncompatibleError(
        "lexicon has " + std::to_string(lexicon->group_count()) +
        " groups but the serving model expects " +
        std::to_string(bundle->model.n_features()));
  }
  ReviewItem item;
  item.sample_id = std::move(sample_id);
  item.text = std::string(text);
  item.snapshot_id = bundle->snapshot_id();
  item.features = ExtractFeatures(text, *lexicon);
  item.attribution = ClassifyFeatures(bundle->model, item.features);
  item.attribution.sample_id = item.sample_id;

  std::lock_guard lock(state_mu_);
  SettleLocked();
  item.created_at = hooks_.clock();
  item.route = RouteFor(queue_.next_sequence());
  const ReviewItem& emitted = queue_.Emit(std::move(item));
  queue_.Advance();
  if (hooks_.on_item) hooks_.on_item(emitted);
  return emitted;
}

std::size_t ReinforcementLoop::SettleAdaptive() {
  std::lock_guard lock(state_mu_);
  return SettleLocked();
}

std::size_t ReinforcementLoop::SettleLocked() {
  std::size_t settled = 0;
  for (const ReviewItem& pending :
       queue_.List(ReviewState::kPending, 0, queue_.size())) {
    if (pending.route != Route::kAdaptiveOnly ||
        pending.emitted_step >= queue_.step()) {
      continue;
    }
    const Attribution& a = pending.attribution;
    const CriticPrediction p = CriticPredict(critic_, a);
    VerdictRecord record;
    record.verdict.item_id = pending.item_id;
    record.verdict.source = VerdictSource::kAdaptive;
    record.verdict.accepted = p.would_accept;
    record.verdict.xi =
        p.would_accept ? std::vector<double>(a.scores.size(), 0.0) : p.xi_hat;
    record.attribution = a;
    record.item_step = pending.emitted_step;
    record.applied_step = queue_.step();
    record.recorded_at = hooks_.clock();
    if (hooks_.on_verdict) hooks_.on_verdict(record);
    const ReviewItem& judged =
        queue_.MarkJudged(pending.item_id, VerdictSource::kAdaptive);
    open_records_.push_back(std::move(record));
    if (hooks_.on_item) hooks_.on_item(judged);
    ++settled;
  }
  return settled;
}

JudgeOutcome ReinforcementLoop::JudgeHuman(std::string_view item_id,
                                           const VerdictInput& input) {
  std::lock_guard lock(state_mu_);
  const ReviewItem& item = queue_.Get(item_id);
  if (item.state != ReviewState::kPending) {
    throw StateError("review item " + item.item_id + " is already " +
                     std::string(ReviewStateName(item.state)));
  }
  if (item.emitted_step >= queue_.step()) {
    throw StateError("review item " + item.item_id +
                     " was emitted in the current step");
  }
  VerdictRecord record;
  record.verdict.item_id = item.item_id;
  record.verdict.source = VerdictSource::kHuman;
  record.verdict.accepted = input.accepted;
  if (!input.accepted) record.verdict.true_author = input.true_author;
  record.verdict.xi = ComputeXi(item.attribution, input);
  record.attribution = item.attribution;
  record.item_step = item.emitted_step;
  record.applied_step = queue_.step();
  record.recorded_at = hooks_.clock();

  AdaptiveCritic learned = CriticLearn(critic_, item.attribution, record.verdict);
  if (hooks_.on_verdict) hooks_.on_verdict(record);
  critic_ = std::move(learned);
  const ReviewItem& judged =
      queue_.MarkJudged(item.item_id, VerdictSource::kHuman);
  if (hooks_.on_item) hooks_.on_item(judged);
  JudgeOutcome out{record.verdict, judged, critic_.p_human(),
                   critic_.agreement()};
  open_records_.push_back(std::move(record));
  return out;
}

EvaluationRecord ReinforcementLoop::EvaluateHeldOut(
    const SnapshotBundle& bundle) const {
  std::vector<LabeledSample> labeled;
  labeled.reserve(held_out_.size());
  for (const HeldOutText& h : held_out_) {
    labeled.push_back({ExtractFeatures(h.text, bundle.lexicon), h.author});
  }
  return Evaluate(bundle.model, labeled);
}

TrainOutcome ReinforcementLoop::Train(int epochs, double step) {
  std::unique_lock train_lock(train_mu_, std::try_to_lock);
  if (!train_lock.owns_lock()) {
    throw StateError("a training cycle is already running");
  }
  if (epochs < 1 || step < 0.0) {
    throw DomainError("train needs epochs >= 1 and step >= 0");
  }

  std::vector<Verdict> verdicts;
  std::vector<LabeledSample> samples;
  {
    std::lock_guard lock(state_mu_);
    SettleLocked();
    for (const VerdictRecord& r : open_records_) {
      verdicts.push_back(r.verdict);
      if (r.verdict.source != VerdictSource::kHuman) continue;
      const ReviewItem& item = queue_.Get(r.verdict.item_id);
      if (item.features.matched_total == 0) continue;
      samples.push_back(
          {item.features, r.verdict.accepted ? item.attribution.selected_author
                                             : *r.verdict.true_author});
    }
  }
  const std::size_t n_records = verdicts.size();
  const std::shared_ptr<const SnapshotBundle> bundle = serving();

  TrainOutcome out;
  out.serving_eval = EvaluateHeldOut(*bundle);
  out.verdicts_considered = n_records;
  out.samples_considered = samples.size();
  std::optional<SnapshotBundle> candidate;
  if (ShouldRetrain(verdicts, samples.size(), config_.gate)) {
    candidate = SnapshotBundle{Refine(bundle->model, samples, epochs, step),
                               bundle->lexicon, bundle->author_names};
    out.candidate_snapshot_id = candidate->snapshot_id();
    out.candidate_eval = EvaluateHeldOut(*candidate);
  }
  out.decision = Gate(verdicts, samples.size(), out.candidate_eval,
                      out.serving_eval, config_.gate);

  std::lock_guard lock(state_mu_);
  EvaluationRecord now_serving = out.serving_eval;
  if (out.decision.persist_candidate) {
    if (hooks_.on_publish) hooks_.on_publish(*candidate, *out.candidate_eval);
    now_serving = *out.candidate_eval;
    {
      std::lock_guard serving_lock(serving_mu_);
      serving_ = std::make_shared<const SnapshotBundle>(std::move(*candidate));
    }
    ++persisted_;
  }
  if (out.decision.retrain) {
    for (std::size_t i = 0; i < n_records; ++i) {
      const std::string& id = open_records_[i].verdict.item_id;
      queue_.MarkApplied(id);
      if (hooks_.on_item) hooks_.on_item(queue_.Get(id));
    }
    open_records_.erase(open_records_.begin(),
                        open_records_.begin() +
                            static_cast<std::ptrdiff_t>(n_records));
  }
  out.serving_snapshot_id = serving()->snapshot_id();
  last_eval_ = std::move(now_serving);
  last_gate_ = out.decision;
  ++cycles_;
  return out;
}

std::vector<ReviewItem> ReinforcementLoop::ListItems(
    std::optional<ReviewState> state, std::uint64_t from_sequence,
    std::size_t limit) const {
  std::lock_guard lock(state_mu_);
  return queue_.List(state, from_sequence, limit);
}

std::optional<ReviewItem> ReinforcementLoop::FindItem(
    std::string_view item_id) const {
  std::lock_guard lock(state_mu_);
  const ReviewItem* item = queue_.Find(item_id);
  return item ? std::optional<ReviewItem>(*item) : std::nullopt;
}

AdaptiveCritic ReinforcementLoop::critic() const {
  std::lock_guard lock(state_mu_);
  return critic_;
}

LoopStatus ReinforcementLoop::Status() const {
  LoopStatus s;
  s.serving = serving();
  std::lock_guard lock(state_mu_);
  s.last_eval = last_eval_;
  s.last_gate = last_gate_;
  s.p_human = critic_.p_human();
  s.agreement = critic_.agreement();
  s.paired_judgments = critic_.paired_judgments();
  s.step = queue_.step();
  for (const ReviewItem& item : queue_.items()) {
    if (item.state == ReviewState::kPending) ++s.pending_items;
  }
  s.open_verdicts = open_records_.size();
  for (const VerdictRecord& r : open_records_) {
    if (r.verdict.source == VerdictSource::kHuman) ++s.open_samples;
  }
  s.cycles = cycles_;
  s.persisted = persisted_;
  return s;
}

}  // namespace authorid
