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

#include "authorid/service.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>

#include "authorid/errors.h"

namespace authorid {

using nlohmann::json;

namespace {

class BadRequest : public DomainError {
 public:
  using DomainError::DomainError;
};

ApiResponse ErrorResponse(int status, std::string_view code,
                          const std::string& message) {
  return {status, {{"error", {{"code", code}, {"message", message}}}}};
}

json ParseBody(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw BadRequest("request body must be an object");
    return j;
  } catch (const json::exception& e) {
    throw BadRequest(std::string("malformed JSON body: ") + e.what());
  }
}

std::optional<std::string> OptString(const json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  const json& v = body.at(key);
  if (v.is_string()) return v.get<std::string>();
  throw BadRequest(std::string("'") + key + "' must be a string");
}

// An author given by name or by index.
std::optional<std::string> OptAuthor(const json& body, const char* key) {
  if (body.contains(key) && body.at(key).is_number_integer()) {
    return std::to_string(body.at(key).get<std::int64_t>());
  }
  return OptString(body, key);
}

template <typename T>
T Number(const json& body, const char* key, T fallback) {
  if (!body.contains(key) || body.at(key).is_null()) return fallback;
  const json& v = body.at(key);
  if (!v.is_number()) {
    throw BadRequest(std::string("'") + key + "' must be a number");
  }
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      throw BadRequest(std::string("'") + key + "' must be an integer");
    }
  }
  return v.get<T>();
}

std::string EncodeCursor(std::uint64_t sequence) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "c%llx",
                static_cast<unsigned long long>(sequence));
  return buf;
}

std::uint64_t DecodeCursor(const std::string& cursor) {
  if (cursor.size() < 2 || cursor.size() > 17 || cursor[0] != 'c') {
    throw BadRequest("invalid cursor");
  }
  std::uint64_t value = 0;
  for (std::size_t i = 1; i < cursor.size(); ++i) {
    const char c = cursor[i];
    int digit;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else {
      throw BadRequest("invalid cursor");
    }
    value = value * 16 + static_cast<std::uint64_t>(digit);
  }
  return value;
}

std::string AuthorName(const SnapshotBundle& bundle, AuthorId a) {
  if (a < 0 || static_cast<std::size_t>(a) >= bundle.author_names.size()) {
    return std::to_string(a);
  }
  return bundle.author_names[a];
}

json AttributionView(const Attribution& a, const SnapshotBundle& bundle) {
  return {{"sample_id", a.sample_id},
          {"scores", a.scores},
          {"selected_author", a.selected_author},
          {"selected_author_name", AuthorName(bundle, a.selected_author)},
          {"margin", a.margin},
          {"no_evidence", a.no_evidence}};
}

json ItemView(const ReviewItem& item, const SnapshotBundle& bundle) {
  return {{"item_id", item.item_id},
          {"sequence", item.sequence},
          {"sample_id", item.sample_id},
          {"text", item.text},
          {"snapshot_id", item.snapshot_id},
          {"created_at", item.created_at},
          {"state", ReviewStateName(item.state)},
          {"route", RouteName(item.route)},
          {"attribution", AttributionView(item.attribution, bundle)},
          {"features", FeaturesToJson(item.features)}};
}

json VerdictView(const Verdict& v, const SnapshotBundle& bundle) {
  return {{"item_id", v.item_id},
          {"source", VerdictSourceName(v.source)},
          {"accepted", v.accepted},
          {"true_author", v.true_author ? json(*v.true_author) : json(nullptr)},
          {"true_author_name", v.true_author
                                   ? json(AuthorName(bundle, *v.true_author))
                                   : json(nullptr)},
          {"xi", v.xi}};
}

json GateView(const GateDecision& d) {
  return {{"retrain", d.retrain},
          {"persist_candidate", d.persist_candidate},
          {"reason", d.reason}};
}

}  // namespace

Api::Api(Store& store, ServiceConfig config)
    : store_(store), config_(std::move(config)) {
  if (auto groups = store_.LoadGroups()) {
    lexicon_ = std::move(*groups);
  }
  fallbacks_ = store_.LoadFallbacks();
  if (auto bundle = store_.LoadServing()) {
    loop_ = MakeLoop(std::move(*bundle), /*resume=*/true);
  }
}

std::shared_ptr<ReinforcementLoop> Api::loop() const {
  std::lock_guard lock(loop_mu_);
  return loop_;
}

std::shared_ptr<ReinforcementLoop> Api::RequireLoop() const {
  std::shared_ptr<ReinforcementLoop> l = loop();
  if (!l) {
    throw ConflictError("no serving model yet; ingest texts and POST /v1/train");
  }
  return l;
}

GroupLexicon Api::WorkingLexicon() const {
  std::lock_guard lock(lexicon_mu_);
  if (!lexicon_) {
    throw ConflictError("the store has no group database (groups.tsv)");
  }
  return *lexicon_;
}

LoopHooks Api::Hooks() {
  LoopHooks hooks;
  hooks.on_item = [this](const ReviewItem& item) { store_.SaveItem(item); };
  hooks.on_verdict = [this](const VerdictRecord& r) {
    store_.AppendVerdict(r);
  };
  hooks.on_publish = [this](const SnapshotBundle& b,
                            const EvaluationRecord& e) {
    store_.PublishSnapshot(b, e);
  };
  hooks.clock = config_.clock;
  return hooks;
}

std::vector<HeldOutText> Api::HeldOut(const SnapshotBundle& bundle) const {
  std::vector<HeldOutText> out;
  for (Split split : {Split::kValidation, Split::kTrain}) {
    for (const TextSample& s : store_.ListSamples(split)) {
      if (!s.author) continue;
      if (auto a = bundle.FindAuthor(*s.author)) out.push_back({s.text, *a});
    }
    if (!out.empty()) break;
  }
  if (out.empty()) throw ConflictError("no labeled texts to evaluate on");
  return out;
}

std::shared_ptr<ReinforcementLoop> Api::MakeLoop(SnapshotBundle bundle,
                                                 bool resume) {
  LoopState state;
  if (resume) {
    const std::vector<VerdictRecord> records = store_.ReadVerdicts();
    state.queue = store_.LoadQueue();
    state.critic = ReplayCritic(bundle.model.n_authors(),
                                config_.loop.critic, records);
    std::set<std::string> applied;
    for (const ReviewItem& item : state.queue.items()) {
      if (item.state == ReviewState::kApplied) applied.insert(item.item_id);
    }
    for (const VerdictRecord& r : records) {
      const ReviewItem* item = state.queue.Find(r.verdict.item_id);
      if (item == nullptr) continue;
      if (item->state == ReviewState::kPending) {
        state.queue.MarkJudged(item->item_id, r.verdict.source);
      }
      if (applied.count(r.verdict.item_id) == 0) {
        state.open_records.push_back(r);
      }
    }
    const SnapshotRegistry registry = store_.Registry();
    if (!registry.history.empty()) {
      state.last_eval = registry.history.back().eval;
    }
  }
  std::vector<HeldOutText> held_out = HeldOut(bundle);
  return std::make_shared<ReinforcementLoop>(std::move(bundle),
                                             std::move(held_out), config_.loop,
                                             Hooks(), std::move(state));
}

ApiResponse Api::Handle(const ApiRequest& request) {
  try {
    const std::string& p = request.path;
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";
    if (post && p == "/v1/texts") return PostTexts(ParseBody(request.body));
    if (post && p == "/v1/classify") {
      return PostClassify(ParseBody(request.body));
    }
    if (get && p == "/v1/review/queue") return GetQueue(request.query);
    if (post && p == "/v1/train") return PostTrain(ParseBody(request.body));
    if (get && p == "/v1/model/status") return GetStatus();
    constexpr std::string_view kReview = "/v1/review/";
    constexpr std::string_view kVerdict = "/verdict";
    if (post && p.starts_with(kReview) && p.ends_with(kVerdict) &&
        p.size() > kReview.size() + kVerdict.size()) {
      const std::string id = p.substr(
          kReview.size(), p.size() - kReview.size() - kVerdict.size());
      if (id.find('/') == std::string::npos) {
        return PostVerdict(id, ParseBody(request.body));
      }
    }
    return ErrorResponse(404, "not_found",
                         "no route for " + request.method + " " + p);
  } catch (const NotFoundError& e) {
    return ErrorResponse(404, "not_found", e.what());
  } catch (const SnapshotIncompatibleError& e) {
    return ErrorResponse(409, "snapshot_incompatible", e.what());
  } catch (const DuplicateError& e) {
    return ErrorResponse(409, "conflict", e.what());
  } catch (const ConflictError& e) {
    return ErrorResponse(409, "conflict", e.what());
  } catch (const StateError& e) {
    return ErrorResponse(409, "conflict", e.what());
  } catch (const DomainError& e) {
    return ErrorResponse(400, "bad_request", e.what());
  } catch (const EncodingError& e) {
    return ErrorResponse(400, "bad_request", e.what());
  } catch (const ParseError& e) {
    return ErrorResponse(400, "bad_request", e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

ApiResponse Api::PostTexts(const json& body) {
  const std::optional<std::string> text = OptString(body, "text");
  if (!text || text->empty()) throw BadRequest("'text' must be non-empty");
  TextSample sample;
  sample.text = *text;
  sample.author = OptString(body, "author");
  const std::optional<std::string> split = OptString(body, "split");
  sample.split = split ? ParseSplit(*split)
                       : (sample.author ? Split::kTrain : Split::kUnlabeled);
  sample.created_at = config_.clock();

  std::lock_guard lock(lexicon_mu_);
  if (!lexicon_) {
    throw ConflictError("the store has no group database (groups.tsv)");
  }
  if (auto id = OptString(body, "sample_id")) {
    sample.sample_id = *id;
  } else {
    for (std::size_t n = store_.SampleCount() + 1;; ++n) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "s%06zu", n);
      if (!store_.HasSample(buf)) {
        sample.sample_id = buf;
        break;
      }
    }
  }
  if (!IsValidSampleId(sample.sample_id)) {
    throw BadRequest("invalid sample id '" + sample.sample_id + "'");
  }
  if (store_.HasSample(sample.sample_id)) {
    throw DuplicateError("sample " + sample.sample_id + " already exists");
  }
  CountResult counted = CountGroups(Tokenize(sample.text, sample.sample_id),
                                    *lexicon_, fallbacks_, LexiconMode::kIngest);
  sample.features = Featurize(std::move(counted.features));
  sample.lexicon_version = counted.lexicon.version();
  const bool grew = counted.lexicon.version() != lexicon_->version();
  store_.PutSample(sample);
  if (grew) {
    store_.SaveGroups(counted.lexicon);
    lexicon_ = std::move(counted.lexicon);
  }
  return {201,
          {{"sample_id", sample.sample_id},
           {"split", SplitName(sample.split)},
           {"author", sample.author ? json(*sample.author) : json(nullptr)},
           {"matched_total", sample.features->matched_total},
           {"unmatched_total", sample.features->unmatched_total},
           {"lexicon_version", sample.lexicon_version},
           {"created_at", sample.created_at}}};
}

ApiResponse Api::PostClassify(const json& body) {
  const std::optional<std::string> text = OptString(body, "text");
  if (!text) throw BadRequest("'text' is required");
  const std::shared_ptr<ReinforcementLoop> l = RequireLoop();
  const GroupLexicon lexicon = WorkingLexicon();
  const ReviewItem item =
      l->Emit(OptString(body, "sample_id").value_or(""), *text, &lexicon);
  const auto bundle = l->serving();
  json out = {{"item_id", item.item_id},
              {"state", ReviewStateName(item.state)},
              {"route", RouteName(item.route)},
              {"snapshot_id", item.snapshot_id},
              {"created_at", item.created_at},
              {"attribution", AttributionView(item.attribution, *bundle)}};
  if (item.attribution.no_evidence) {
    out["warning"] = "no lexicon word matched; scores are uniform";
  }
  return {200, std::move(out)};
}

ApiResponse Api::GetQueue(const std::map<std::string, std::string>& query) {
  const std::shared_ptr<ReinforcementLoop> l = RequireLoop();
  std::optional<ReviewState> state = ReviewState::kPending;
  if (auto it = query.find("state"); it != query.end()) {
    state = it->second == "all" ? std::nullopt
                                : std::optional(ParseReviewState(it->second));
  }
  std::size_t limit = config_.default_page_size;
  if (auto it = query.find("limit"); it != query.end()) {
    std::size_t parsed = 0;
    auto [ptr, ec] = std::from_chars(
        it->second.data(), it->second.data() + it->second.size(), parsed);
    if (ec != std::errc() || ptr != it->second.data() + it->second.size() ||
        parsed == 0) {
      throw BadRequest("'limit' must be a positive integer");
    }
    limit = std::min(parsed, config_.max_page_size);
  }
  std::uint64_t from = 0;
  if (auto it = query.find("cursor"); it != query.end()) {
    from = DecodeCursor(it->second);
  }
  std::vector<ReviewItem> items = l->ListItems(state, from, limit + 1);
  json next = nullptr;
  if (items.size() > limit) {
    next = EncodeCursor(items[limit].sequence);
    items.resize(limit);
  }
  const auto bundle = l->serving();
  json views = json::array();
  for (const ReviewItem& item : items) views.push_back(ItemView(item, *bundle));
  return {200, {{"items", std::move(views)}, {"next_cursor", next}}};
}

ApiResponse Api::PostVerdict(const std::string& item_id, const json& body) {
  const std::shared_ptr<ReinforcementLoop> l = RequireLoop();
  if (!body.contains("accepted") || !body.at("accepted").is_boolean()) {
    throw BadRequest("'accepted' must be a boolean");
  }
  if (!l->FindItem(item_id)) {
    throw NotFoundError("unknown review item " + item_id);
  }
  VerdictInput input;
  input.accepted = body.at("accepted").get<bool>();
  const auto bundle = l->serving();
  if (auto author = OptAuthor(body, "true_author")) {
    input.true_author = bundle->FindAuthor(*author);
    if (!input.true_author) throw BadRequest("unknown author '" + *author + "'");
  }
  if (!input.accepted && !input.true_author) {
    throw BadRequest("a rejection needs 'true_author'");
  }
  const JudgeOutcome o = l->JudgeHuman(item_id, input);
  return {200,
          {{"verdict", VerdictView(o.verdict, *bundle)},
           {"item_state", ReviewStateName(o.item.state)},
           {"p_human", o.p_human},
           {"agreement", o.agreement}}};
}

ApiResponse Api::PostTrain(const json& body) {
  const int epochs = Number<int>(body, "epochs", 10);
  const double step = Number<double>(body, "step", 0.05);
  if (std::shared_ptr<ReinforcementLoop> l = loop()) {
    const TrainOutcome t = l->Train(epochs, step);
    return {200,
            {{"bootstrapped", false},
             {"decision", GateView(t.decision)},
             {"serving_snapshot_id", t.serving_snapshot_id},
             {"candidate_snapshot_id", t.candidate_snapshot_id
                                           ? json(*t.candidate_snapshot_id)
                                           : json(nullptr)},
             {"candidate_eval", t.candidate_eval
                                    ? EvaluationToJson(*t.candidate_eval)
                                    : json(nullptr)},
             {"serving_eval", EvaluationToJson(t.serving_eval)},
             {"verdicts_considered", t.verdicts_considered},
             {"samples_considered", t.samples_considered}}};
  }

  std::unique_lock bootstrap(bootstrap_mu_, std::try_to_lock);
  if (!bootstrap.owns_lock()) {
    throw StateError("a training cycle is already running");
  }
  if (loop()) return PostTrain(body);
  const GroupLexicon lexicon = WorkingLexicon();
  std::set<std::string> names;
  const std::vector<TextSample> train = store_.ListSamples(Split::kTrain);
  for (const TextSample& s : train) names.insert(*s.author);
  std::vector<std::string> authors(names.begin(), names.end());
  if (authors.size() < 2) {
    throw ConflictError("training needs labeled texts from two authors");
  }
  std::vector<LabeledSample> labeled;
  for (const TextSample& s : train) {
    const auto pos = std::lower_bound(authors.begin(), authors.end(), *s.author);
    labeled.push_back({ExtractFeatures(s.text, lexicon),
                       static_cast<AuthorId>(pos - authors.begin())});
  }
  std::optional<double> beta;
  if (body.contains("beta") && !body.at("beta").is_null()) {
    beta = Number<double>(body, "beta", 1.0);
  }
  RbpnnModel model = TrainOutputWeights(
      BuildModel(labeled, beta, config_.kernel,
                 static_cast<int>(authors.size()), lexicon.version()));
  SnapshotBundle bundle{std::move(model), lexicon, authors};
  std::vector<HeldOutText> held_out = HeldOut(bundle);
  std::vector<LabeledSample> eval_set;
  for (const HeldOutText& h : held_out) {
    eval_set.push_back({ExtractFeatures(h.text, lexicon), h.author});
  }
  const EvaluationRecord eval = Evaluate(bundle.model, eval_set);
  store_.PublishSnapshot(bundle, eval);
  const std::string id = bundle.snapshot_id();
  LoopState state;
  state.last_eval = eval;
  auto l = std::make_shared<ReinforcementLoop>(
      std::move(bundle), std::move(held_out), config_.loop, Hooks(),
      std::move(state));
  {
    std::lock_guard lock(loop_mu_);
    loop_ = std::move(l);
  }
  return {200,
          {{"bootstrapped", true},
           {"decision",
            {{"retrain", true},
             {"persist_candidate", true},
             {"reason", "initial model built from " +
                            std::to_string(labeled.size()) +
                            " training texts"}}},
           {"serving_snapshot_id", id},
           {"candidate_snapshot_id", id},
           {"candidate_eval", EvaluationToJson(eval)},
           {"serving_eval", nullptr},
           {"verdicts_considered", 0},
           {"samples_considered", labeled.size()}}};
}

ApiResponse Api::GetStatus() {
  const std::shared_ptr<ReinforcementLoop> l = loop();
  if (!l) {
    return {200,
            {{"ready", false},
             {"serving_snapshot_id", nullptr},
             {"samples_stored", store_.SampleCount()}}};
  }
  const LoopStatus s = l->Status();
  const SnapshotBundle& b = *s.serving;
  return {200,
          {{"ready", true},
           {"serving_snapshot_id", b.snapshot_id()},
           {"n_features", b.model.n_features()},
           {"n_samples", b.model.n_samples()},
           {"n_authors", b.model.n_authors()},
           {"authors", b.author_names},
           {"groups", b.lexicon.group_names()},
           {"lexicon_version", b.model.lexicon_version()},
           {"last_eval",
            s.last_eval ? EvaluationToJson(*s.last_eval) : json(nullptr)},
           {"last_gate", s.last_gate ? GateView(*s.last_gate) : json(nullptr)},
           {"p_human", s.p_human},
           {"agreement", s.agreement},
           {"paired_judgments", s.paired_judgments},
           {"pending_items", s.pending_items},
           {"open_verdicts", s.open_verdicts},
           {"step", s.step},
           {"train_cycles", s.cycles},
           {"persisted_candidates", s.persisted},
           {"snapshot_history", store_.Registry().history.size()},
           {"samples_stored", store_.SampleCount()}}};
}

}  // namespace authorid
