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

// The live feedback cycle: classify and enqueue, route to the human or the
// adaptive critic, apply verdicts, then refine and gate the classifier. The
// serving snapshot is an immutable bundle swapped under a short lock, so
// classification never waits for a training cycle.

#ifndef AUTHORID_LOOP_H_
#define AUTHORID_LOOP_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "authorid/critic.h"
#include "authorid/snapshot.h"

namespace authorid {

// "YYYY-MM-DDTHH:MM:SSZ".
std::string FormatUtc(std::chrono::system_clock::time_point t);
std::string UtcNow();

struct HeldOutText {
  std::string text;
  AuthorId author = 0;
};

struct LoopConfig {
  CriticConfig critic;
  GatePolicy gate;
  // Seeds the per-item routing draws.
  std::uint64_t route_seed = 1;
};

struct LoopHooks {
  // Called under the loop's state lock, in the order events happen. A
  // throwing on_publish aborts the publication and keeps the serving model.
  std::function<void(const ReviewItem&)> on_item;
  std::function<void(const VerdictRecord&)> on_verdict;
  std::function<void(const SnapshotBundle&, const EvaluationRecord&)> on_publish;
  std::function<std::string()> clock = UtcNow;
};

// State a loop resumes from after a restart.
struct LoopState {
  ReviewQueue queue;
  std::optional<AdaptiveCritic> critic;  // fresh when absent
  // Verdict records whose items are not yet applied.
  std::vector<VerdictRecord> open_records;
  std::optional<EvaluationRecord> last_eval;
};

struct JudgeOutcome {
  Verdict verdict;
  ReviewItem item;
  double p_human = 1.0;
  double agreement = 0.0;
};

struct TrainOutcome {
  GateDecision decision;
  std::string serving_snapshot_id;  // after the cycle
  std::optional<std::string> candidate_snapshot_id;
  std::optional<EvaluationRecord> candidate_eval;
  EvaluationRecord serving_eval;  // of the model serving before the cycle
  std::size_t verdicts_considered = 0;
  std::size_t samples_considered = 0;
};

struct LoopStatus {
  std::shared_ptr<const SnapshotBundle> serving;
  std::optional<EvaluationRecord> last_eval;
  std::optional<GateDecision> last_gate;
  double p_human = 1.0;
  double agreement = 0.0;
  std::uint64_t paired_judgments = 0;
  std::uint64_t step = 0;
  std::size_t pending_items = 0;
  std::size_t open_verdicts = 0;
  std::size_t open_samples = 0;
  std::size_t cycles = 0;
  std::size_t persisted = 0;
};

class ReinforcementLoop {
 public:
  ReinforcementLoop(SnapshotBundle serving, std::vector<HeldOutText> held_out,
                    LoopConfig config = {}, LoopHooks hooks = {},
                    LoopState state = {});

  ReinforcementLoop(const ReinforcementLoop&) = delete;
  ReinforcementLoop& operator=(const ReinforcementLoop&) = delete;

  std::shared_ptr<const SnapshotBundle> serving() const;

  // Classifies `text` with the serving snapshot, enqueues the attribution
  // and advances the step. Features are counted read-only against
  // `lexicon`, or the snapshot's own lexicon when null; a lexicon whose
  // group count differs from N_F raises SnapshotIncompatibleError.
  // Adaptive-routed items of earlier steps are judged by the critic first.
  ReviewItem Emit(std::string sample_id, std::string_view text,
                  const GroupLexicon* lexicon = nullptr);

  // Applies a human verdict. NotFoundError for unknown items, StateError when
  // already judged, DomainError when a rejection lacks a valid author.
  JudgeOutcome JudgeHuman(std::string_view item_id, const VerdictInput& input);

  // Judges every pending adaptive-routed item emitted before this step.
  std::size_t SettleAdaptive();

  // Refine, evaluate on the held-out texts, gate and maybe publish. One
  // cycle at a time; StateError when one is already running.
  TrainOutcome Train(int epochs, double step);

  std::vector<ReviewItem> ListItems(std::optional<ReviewState> state,
                                    std::uint64_t from_sequence,
                                    std::size_t limit) const;
  std::optional<ReviewItem> FindItem(std::string_view item_id) const;
  AdaptiveCritic critic() const;
  LoopStatus Status() const;

 private:
  Route RouteFor(std::uint64_t sequence) const;
  std::size_t SettleLocked();
  EvaluationRecord EvaluateHeldOut(const SnapshotBundle& bundle) const;

  const std::vector<HeldOutText> held_out_;
  const LoopConfig config_;
  const LoopHooks hooks_;

  mutable std::mutex serving_mu_;
  std::shared_ptr<const SnapshotBundle> serving_;

  mutable std::mutex state_mu_;
  ReviewQueue queue_;
  AdaptiveCritic critic_;
  std::vector<VerdictRecord> open_records_;
  std::optional<EvaluationRecord> last_eval_;
  std::optional<GateDecision> last_gate_;
  std::size_t cycles_ = 0;
  std::size_t persisted_ = 0;

  std::mutex train_mu_;
};

}  // namespace authorid

#endif  // AUTHORID_LOOP_H_
