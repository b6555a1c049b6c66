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

// authorid: operator command line for the attribution engine.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "authorid/errors.h"
#include "authorid/lexicon.h"
#include "authorid/neural.h"
#include "authorid/rbpnn.h"
#include "authorid/records.h"
#include "authorid/service.h"
#include "authorid/snapshot.h"
#include "authorid/store.h"
#include "authorid/synthetic.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace authorid {
namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string format = "text";
  std::string data = "authorid-data";

  bool record() const { return format == "record"; }
};

// One JSON object per line in record mode.
void Emit(const Globals& g, const json& record, const std::string& text) {
  if (g.record()) {
    std::cout << record.dump() << '\n';
  } else if (!text.empty()) {
    std::cout << text << '\n';
  }
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<fs::path> TextFiles(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---- ingest ----

struct IngestArgs {
  std::string dir;
  std::string split = "train";
  std::optional<std::string> author;
  std::optional<std::string> groups;
};

int RunIngest(const Globals& g, const IngestArgs& a) {
  Store store(g.data);
  if (a.groups) store.SaveGroups(LoadGroupDb(*a.groups));
  std::optional<GroupLexicon> lexicon = store.LoadGroups();
  if (!lexicon) {
    throw DomainError("no group database; pass --groups <groupdb>");
  }
  const std::vector<FallbackLexicon> fallbacks = store.LoadFallbacks();
  const Split split = ParseSplit(a.split);

  std::vector<std::pair<fs::path, std::optional<std::string>>> inputs;
  if (a.author) {
    for (const fs::path& f : TextFiles(a.dir)) inputs.emplace_back(f, a.author);
  } else {
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(a.dir)) {
      if (entry.is_directory()) subdirs.push_back(entry.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    for (const fs::path& d : subdirs) {
      for (const fs::path& f : TextFiles(d)) {
        inputs.emplace_back(f, d.filename().string());
      }
    }
    if (split == Split::kUnlabeled) {
      for (const fs::path& f : TextFiles(a.dir)) {
        inputs.emplace_back(f, std::nullopt);
      }
    }
  }
  if (inputs.empty()) throw DomainError("no .txt files under " + a.dir);

  const std::uint64_t version_before = lexicon->version();
  std::size_t stored = 0;
  for (const auto& [path, author] : inputs) {
    TextSample s;
    s.sample_id = path.stem().string();
    if (!a.author && author) s.sample_id = *author + "-" + s.sample_id;
    s.author = split == Split::kUnlabeled ? std::nullopt : author;
    s.split = split;
    s.text = ReadText(path);
    s.created_at = UtcNow();
    CountResult counted = CountGroups(Tokenize(s.text, s.sample_id), *lexicon,
                                      fallbacks, LexiconMode::kIngest);
    s.features = Featurize(std::move(counted.features));
    s.lexicon_version = counted.lexicon.version();
    *lexicon = std::move(counted.lexicon);
    store.PutSample(s);
    ++stored;
    Emit(g,
         {{"event", "sample"},
          {"sample_id", s.sample_id},
          {"author", s.author ? json(*s.author) : json(nullptr)},
          {"split", SplitName(split)},
          {"matched_total", s.features->matched_total},
          {"unmatched_total", s.features->unmatched_total}},
         "");
  }
  if (lexicon->version() != version_before) store.SaveGroups(*lexicon);
  Emit(g,
       {{"event", "ingest"},
        {"stored", stored},
        {"split", SplitName(split)},
        {"groups", lexicon->group_count()},
        {"words", lexicon->word_count()}},
       "ingested " + std::to_string(stored) + " texts into " + g.data + " (" +
           std::to_string(lexicon->group_count()) + " groups, " +
           std::to_string(lexicon->word_count()) + " words)");
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::optional<std::string> groups;
  std::optional<double> beta;
  std::optional<std::string> out;
  std::string kernel = "gaussian";
  double spread = 1.0;
};

std::vector<LabeledSample> Labeled(const std::vector<TextSample>& samples,
                                   const SnapshotBundle& bundle) {
  std::vector<LabeledSample> out;
  for (const TextSample& s : samples) {
    if (!s.author) continue;
    const std::optional<AuthorId> a = bundle.FindAuthor(*s.author);
    if (!a) throw DomainError("author '" + *s.author + "' is not in the model");
    out.push_back({ExtractFeatures(s.text, bundle.lexicon), *a});
  }
  return out;
}

int RunTrain(const Globals& g, const TrainArgs& a) {
  Store store(g.data);
  std::optional<GroupLexicon> lexicon =
      a.groups ? std::optional(LoadGroupDb(*a.groups)) : store.LoadGroups();
  if (!lexicon) throw DomainError("no group database; pass --groups");
  const std::vector<TextSample> train = store.ListSamples(Split::kTrain);
  std::set<std::string> names;
  for (const TextSample& s : train) names.insert(*s.author);
  std::vector<std::string> authors(names.begin(), names.end());
  if (train.empty()) throw DomainError("no training texts in " + g.data);

  std::vector<LabeledSample> labeled;
  for (const TextSample& s : train) {
    const auto pos = std::lower_bound(authors.begin(), authors.end(), *s.author);
    labeled.push_back({ExtractFeatures(s.text, *lexicon),
                       static_cast<AuthorId>(pos - authors.begin())});
  }
  const KernelSpec kernel(ParseKernelKind(a.kernel), a.spread);
  RbpnnModel model = TrainOutputWeights(
      BuildModel(labeled, a.beta, kernel, static_cast<int>(authors.size()),
                 lexicon->version()));
  SnapshotBundle bundle{std::move(model), *lexicon, authors};

  std::vector<TextSample> validation = store.ListSamples(Split::kValidation);
  const std::vector<LabeledSample> eval_set =
      validation.empty() ? labeled : Labeled(validation, bundle);
  const EvaluationRecord eval = Evaluate(bundle.model, eval_set);
  if (a.out) {
    SaveBundle(bundle, *a.out);
  } else {
    store.PublishSnapshot(bundle, eval);
  }
  const RbpnnModel& m = bundle.model;
  Emit(g,
       {{"event", "train"},
        {"snapshot_id", m.snapshot_id()},
        {"n_features", m.n_features()},
        {"n_samples", m.n_samples()},
        {"n_authors", m.n_authors()},
        {"beta", m.beta()},
        {"training_loss", TrainingLoss(m)},
        {"eval_split", validation.empty() ? "train" : "validation"},
        {"accuracy", eval.accuracy},
        {"missed_rate", eval.missed_rate},
        {"out", a.out ? json(*a.out) : json(nullptr)}},
       "N_F=" + std::to_string(m.n_features()) +
           " N_S=" + std::to_string(m.n_samples()) +
           " N_G=" + std::to_string(m.n_authors()) + " beta=" + Fixed(m.beta()) +
           "\nsnapshot " + m.snapshot_id() +
           (a.out ? " written to " + *a.out : " published to " + g.data) +
           "\naccuracy on " + (validation.empty() ? "train" : "validation") +
           " " + Fixed(eval.accuracy) + ", missed_rate " +
           Fixed(eval.missed_rate));
  return 0;
}

SnapshotBundle ResolveSnapshot(const Globals& g,
                               const std::optional<std::string>& path) {
  if (path) return LoadBundle(*path);
  Store store(g.data);
  std::optional<SnapshotBundle> serving = store.LoadServing();
  if (!serving) throw DomainError("no snapshot; pass --snapshot <path>");
  return std::move(*serving);
}

// ---- classify ----

int RunClassify(const Globals& g, const std::optional<std::string>& snapshot,
                const std::string& text_path) {
  const SnapshotBundle bundle = ResolveSnapshot(g, snapshot);
  const std::string text = ReadText(text_path);
  const Attribution a = Classify(bundle.model, bundle.lexicon, text,
                                 fs::path(text_path).stem().string());
  if (a.no_evidence) {
    std::cerr << "authorid: warning: no lexicon word matched; scores are "
                 "uniform\n";
  }
  json scores = json::object();
  std::ostringstream lines;
  for (std::size_t k = 0; k < a.scores.size(); ++k) {
    scores[bundle.author_names[k]] = a.scores[k];
    lines << bundle.author_names[k] << '\t' << Fixed(a.scores[k]) << '\n';
  }
  lines << "selected " << bundle.author_names[a.selected_author] << " (margin "
        << Fixed(a.margin) << ")";
  Emit(g,
       {{"event", "classify"},
        {"sample_id", a.sample_id},
        {"snapshot_id", bundle.snapshot_id()},
        {"scores", scores},
        {"selected_author", bundle.author_names[a.selected_author]},
        {"margin", a.margin},
        {"no_evidence", a.no_evidence}},
       lines.str());
  return 0;
}

// ---- evaluate ----

int RunEvaluate(const Globals& g, const std::optional<std::string>& snapshot,
                const std::string& split_name,
                const std::optional<std::string>& export_path) {
  const SnapshotBundle bundle = ResolveSnapshot(g, snapshot);
  Store store(g.data);
  const std::vector<TextSample> samples =
      store.ListSamples(ParseSplit(split_name));
  const std::vector<LabeledSample> labeled = Labeled(samples, bundle);
  if (labeled.empty()) throw DomainError("no labeled " + split_name + " texts");
  const EvaluationRecord e = Evaluate(bundle.model, labeled);

  std::vector<const TextSample*> used;
  for (const TextSample& s : samples) {
    if (s.author) used.push_back(&s);
  }
  if (export_path) {
    std::ofstream out(*export_path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + *export_path);
    out << "sample_id,true_author,selected_author";
    for (const std::string& n : bundle.author_names) out << ",e_" << n;
    for (const std::string& n : bundle.author_names) out << ",sel_" << n;
    out << '\n';
    for (std::size_t i = 0; i < e.sample_count; ++i) {
      const auto& sel = e.selection_error[i];
      AuthorId chosen = labeled[i].author;
      for (std::size_t k = 0; k < sel.size(); ++k) {
        if (sel[k] == -1) chosen = static_cast<AuthorId>(k);
      }
      out << used[i]->sample_id << ',' << *used[i]->author << ','
          << bundle.author_names[chosen];
      for (double v : e.score_error[i]) out << ',' << json(v).dump();
      for (int v : sel) out << ',' << v;
      out << '\n';
    }
  }
  if (g.record()) {
    for (std::size_t i = 0; i < e.sample_count; ++i) {
      Emit(g,
           {{"event", "sample_error"},
            {"sample_id", used[i]->sample_id},
            {"true_author", *used[i]->author},
            {"e", e.score_error[i]},
            {"selection_error", e.selection_error[i]}},
           "");
    }
  }
  Emit(g,
       {{"event", "evaluate"},
        {"snapshot_id", bundle.snapshot_id()},
        {"split", split_name},
        {"sample_count", e.sample_count},
        {"accuracy", e.accuracy},
        {"missed_rate", e.missed_rate},
        {"false_positive_rate", e.false_positive_rate}},
       "samples " + std::to_string(e.sample_count) + "\naccuracy " +
           Fixed(e.accuracy) + "\nmissed_rate " + Fixed(e.missed_rate) +
           "\nfalse_positive_rate " + Fixed(e.false_positive_rate));
  return 0;
}

// ---- parzen-check ----

struct ParzenArgs {
  std::string kernel = "gaussian";
  double alpha = 0.2;
  double c = 1.0;
  double spread = 1.0;
  int dimension = 1;
  double extent = 12.0;
  std::int64_t n_max = 1000000;
};

int RunParzen(const Globals& g, const ParzenArgs& a) {
  const KernelSpec spec(ParseKernelKind(a.kernel), a.spread, a.dimension,
                        {a.c, a.alpha});
  const ParzenReport r = CheckParzenConditions(spec, a.extent, a.n_max);
  const bool ok = r.Passed();
  Emit(g,
       {{"event", "parzen_check"},
        {"kernel", a.kernel},
        {"dimension", a.dimension},
        {"alpha", a.alpha},
        {"c", a.c},
        {"integral_of_K", r.integral_of_K},
        {"sup_K", r.sup_K},
        {"tail_decay_ok", r.tail_decay_ok},
        {"h_n_to_zero", r.h_n_to_zero},
        {"n_h_n_to_inf", r.n_h_n_to_inf},
        {"passed", ok}},
       "integral_of_K " + Fixed(r.integral_of_K, 9) + "\nsup_K " +
           Fixed(r.sup_K, 6) + "\ntail_decay_ok " +
           (r.tail_decay_ok ? "yes" : "no") + "\nh_n_to_zero " +
           (r.h_n_to_zero ? "yes" : "no") + "\nn_h_n_to_inf " +
           (r.n_h_n_to_inf ? "yes" : "no") + "\n" +
           (ok ? "PASS" : "FAIL"));
  return ok ? 0 : 2;
}

// ---- serve ----

int RunServe(const Globals& g, const std::string& addr) {
  const std::size_t colon = addr.rfind(':');
  if (colon == std::string::npos) throw DomainError("--addr must be host:port");
  const std::string host = addr.substr(0, colon);
  const int port = std::stoi(addr.substr(colon + 1));
  Store store(g.data);
  ServiceConfig config;
  config.loop.route_seed = g.seed;
  Api api(store, config);
  Serve(api, host, port);
  return 0;
}

// ---- synth ----

struct SynthArgs {
  std::string out;
  SyntheticConfig config;
  double train_fraction = 0.75;
};

int RunSynth(const Globals& g, SynthArgs a) {
  a.config.seed = g.seed;
  const SyntheticCorpus corpus = GenerateCorpus(a.config);
  const CorpusSplit split = SplitCorpus(corpus, a.train_fraction);
  const fs::path root(a.out);
  fs::create_directories(root);
  SaveGroupDb(corpus.lexicon, root / "groups.tsv");
  auto write = [&](const std::vector<SyntheticText>& texts, const char* dir) {
    for (const SyntheticText& t : texts) {
      const fs::path d = root / dir / corpus.author_names[t.author];
      fs::create_directories(d);
      std::ofstream out(d / (t.sample_id + ".txt"), std::ios::binary);
      out << t.text;
      if (!out) throw StorageError("cannot write under " + d.string());
    }
  };
  write(split.train, "train");
  write(split.validation, "validation");
  Emit(g,
       {{"event", "synth"},
        {"out", a.out},
        {"authors", a.config.n_authors},
        {"groups", a.config.n_groups},
        {"train", split.train.size()},
        {"validation", split.validation.size()},
        {"seed", g.seed}},
       "wrote " + std::to_string(split.train.size()) + " train and " +
           std::to_string(split.validation.size()) + " validation texts to " +
           a.out);
  return 0;
}

}  // namespace
}  // namespace authorid

int main(int argc, char** argv) {
  using namespace authorid;
  CLI::App app{"authorid: authorship attribution with an RBPNN and a "
               "reinforcement review loop"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every stochastic choice");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "record"}));
  app.add_option("--data", g.data, "Store directory");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load texts into the store");
  ingest_cmd->add_option("--dir", ingest.dir, "Directory of .txt files")
      ->required()
      ->check(CLI::ExistingDirectory);
  ingest_cmd->add_option("--split", ingest.split, "train|validation|unlabeled")
      ->check(CLI::IsMember({"train", "validation", "unlabeled"}));
  ingest_cmd->add_option("--author", ingest.author,
                         "Author of every file; default: subdirectory names");
  ingest_cmd->add_option("--groups", ingest.groups,
                         "Group database to install into the store")
      ->check(CLI::ExistingFile);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Build and fit a model");
  train_cmd->add_option("--groups", train.groups, "Group database")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--beta", train.beta, "Pattern-layer width")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--out", train.out,
                        "Snapshot file; default: publish to the store");
  train_cmd->add_option("--kernel", train.kernel, "gaussian|exponential_pnn")
      ->check(CLI::IsMember({"gaussian", "exponential_pnn"}));
  train_cmd->add_option("--spread", train.spread, "Kernel spread")
      ->check(CLI::PositiveNumber);

  std::optional<std::string> snapshot;
  std::string text_path;
  auto* classify_cmd = app.add_subcommand("classify", "Attribute one text");
  classify_cmd->add_option("--snapshot", snapshot,
                           "Snapshot file; default: the store's serving one");
  classify_cmd->add_option("--text", text_path, "Text file")
      ->required()
      ->check(CLI::ExistingFile);

  std::string eval_split = "validation";
  std::optional<std::string> export_path;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a labeled split");
  evaluate_cmd->add_option("--snapshot", snapshot,
                           "Snapshot file; default: the store's serving one");
  evaluate_cmd->add_option("--split", eval_split, "train|validation")
      ->check(CLI::IsMember({"train", "validation"}));
  evaluate_cmd->add_option("--export", export_path,
                           "CSV of the per-sample e matrix");

  ParzenArgs parzen;
  auto* parzen_cmd =
      app.add_subcommand("parzen-check", "Check Parzen window conditions");
  parzen_cmd->add_option("--kernel", parzen.kernel, "gaussian|exponential_pnn|box")
      ->check(CLI::IsMember({"gaussian", "exponential_pnn", "box"}));
  parzen_cmd->add_option("--alpha", parzen.alpha, "Bandwidth exponent");
  parzen_cmd->add_option("--c", parzen.c, "Bandwidth scale");
  parzen_cmd->add_option("--spread", parzen.spread, "Kernel spread");
  parzen_cmd->add_option("--dimension", parzen.dimension, "1, 2 or 3")
      ->check(CLI::Range(1, 3));
  parzen_cmd->add_option("--extent", parzen.extent, "Grid half-width");
  parzen_cmd->add_option("--n-max", parzen.n_max, "Largest n for h_n checks");

  std::string addr = "127.0.0.1:8080";
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--addr", addr, "host:port");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--authors", synth.config.n_authors, "Authors");
  synth_cmd->add_option("--groups", synth.config.n_groups, "Word groups");
  synth_cmd->add_option("--texts", synth.config.texts_per_author,
                        "Texts per author");
  synth_cmd->add_option("--tokens", synth.config.tokens_per_text,
                        "Tokens per text");
  synth_cmd->add_option("--train-fraction", synth.train_fraction,
                        "Share of each author's texts used for training")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "authorid: error: " << e.what() << '\n';
    return 64;
  }
  try {
    if (*ingest_cmd) return RunIngest(g, ingest);
    if (*train_cmd) return RunTrain(g, train);
    if (*classify_cmd) return RunClassify(g, snapshot, text_path);
    if (*evaluate_cmd) return RunEvaluate(g, snapshot, eval_split, export_path);
    if (*parzen_cmd) return RunParzen(g, parzen);
    if (*serve_cmd) return RunServe(g, addr);
    if (*synth_cmd) return RunSynth(g, synth);
  } catch (const std::exception& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    std::cerr << "authorid: error: " << message << '\n';
    return 1;
  }
  return 1;
}
