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

#include "authorid/rbpnn.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "authorid/errors.h"
#include "authorid/snapshot.h"

namespace authorid {
namespace {

constexpr double kMinSelectorWeight = 1e-6;

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

Eigen::MatrixXd OneHot(const std::vector<AuthorId>& labels, int n_authors) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(labels.size(), n_authors);
  for (std::size_t i = 0; i < labels.size(); ++i) y(i, labels[i]) = 1.0;
  return y;
}

void CheckFrequencies(const FeatureVector& features, std::size_t n_features) {
  if (features.frequencies.size() != n_features) {
    throw DomainError("feature vector has " +
                      std::to_string(features.frequencies.size()) +
                      " frequencies, expected " + std::to_string(n_features));
  }
}

Eigen::Map<const Eigen::VectorXd> AsVector(const FeatureVector& features) {
  return {features.frequencies.data(),
          static_cast<Eigen::Index>(features.frequencies.size())};
}

}  // namespace

RbpnnModel RbpnnModel::FromParts(Parts parts) {
  const Eigen::Index n_s = parts.centroids.rows();
  const Eigen::Index n_f = parts.centroids.cols();
  const Eigen::Index n_g = parts.selector_weights.size();
  if (n_s < 1 || n_f < 1) throw DomainError("model needs N_S >= 1 and N_F >= 1");
  if (n_g < 2) throw DomainError("N_G >= 2 required");
  if (static_cast<Eigen::Index>(parts.labels.size()) != n_s) {
    throw DomainError("one label per pattern unit required");
  }
  for (AuthorId a : parts.labels) {
    if (a < 0 || a >= n_g) throw DomainError("label out of author range");
  }
  if (parts.summation_weights.rows() != n_s ||
      parts.summation_weights.cols() != n_g) {
    throw DomainError("summation weights must be N_S x N_G");
  }
  if (!(parts.beta > 0.0) || !std::isfinite(parts.beta)) {
    throw DomainError("beta must be positive");
  }
  if (!(parts.selector_weights.array() > 0.0).all() ||
      !parts.selector_weights.allFinite()) {
    throw DomainError("selector weights must be positive");
  }
  if (!parts.centroids.allFinite() || !parts.summation_weights.allFinite()) {
    throw DomainError("model weights must be finite");
  }
  return RbpnnModel(std::move(parts));
}

RbpnnModel::RbpnnModel(Parts parts) : parts_(std::move(parts)) {
  nlohmann::json content = ModelToJson(*this);
  content.erase("snapshot_id");
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(Fnv1a(content.dump())));
  snapshot_id_ = std::string("snap-") + hex;
}

bool RbpnnModel::operator==(const RbpnnModel& other) const {
  const Parts& a = parts_;
  const Parts& b = other.parts_;
  return a.centroids.rows() == b.centroids.rows() &&
         a.centroids.cols() == b.centroids.cols() &&
         a.centroids == b.centroids && a.labels == b.labels &&
         a.beta == b.beta && a.summation_weights == b.summation_weights &&
         a.selector_weights == b.selector_weights && a.kernel == b.kernel &&
         a.lexicon_version == b.lexicon_version;
}

double DefaultBeta(const Eigen::MatrixXd& centroids) {
  std::vector<double> distances;
  const Eigen::Index n = centroids.rows();
  distances.reserve(n * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      distances.push_back((centroids.row(i) - centroids.row(j)).norm());
    }
  }
  if (distances.empty()) return 1.0;
  const std::size_t mid = distances.size() / 2;
  std::nth_element(distances.begin(), distances.begin() + mid, distances.end());
  double median = distances[mid];
  if (distances.size() % 2 == 0) {
    const double lower =
        *std::max_element(distances.begin(), distances.begin() + mid);
    median = 0.5 * (median + lower);
  }
  if (median > 0.0) return median;
  double sum = 0.0;
  std::size_t positive = 0;
  for (double d : distances) {
    if (d > 0.0) sum += d, ++positive;
  }
  return positive > 0 ? sum / static_cast<double>(positive) : 1.0;
}

RbpnnModel BuildModel(std::span<const LabeledSample> training,
                      std::optional<double> beta, const KernelSpec& kernel,
                      int n_authors, std::uint64_t lexicon_version) {
  if (training.empty()) throw DomainError("training set is empty");
  const std::size_t n_f = training.front().features.frequencies.size();
  if (n_f == 0) throw DomainError("feature vectors are empty");
  int max_label = -1;
  for (const LabeledSample& s : training) {
    CheckFrequencies(s.features, n_f);
    if (s.author < 0) throw DomainError("negative author id");
    max_label = std::max(max_label, s.author);
  }
  const int n_g = n_authors > 0 ? n_authors : max_label + 1;
  if (max_label >= n_g) throw DomainError("author id beyond n_authors");
  if (n_g < 2) throw DomainError("N_G >= 2 required");
  std::vector<int> per_author(n_g, 0);
  for (const LabeledSample& s : training) ++per_author[s.author];
  for (int a = 0; a < n_g; ++a) {
    if (per_author[a] == 0) {
      throw DomainError("author " + std::to_string(a) + " has no samples");
    }
  }

  RbpnnModel::Parts parts;
  parts.centroids.resize(training.size(), n_f);
  for (std::size_t i = 0; i < training.size(); ++i) {
    parts.centroids.row(i) = AsVector(training[i].features).transpose();
    parts.labels.push_back(training[i].author);
  }
  parts.beta = beta.value_or(DefaultBeta(parts.centroids));
  parts.summation_weights = Eigen::MatrixXd::Zero(training.size(), n_g);
  parts.selector_weights = Eigen::VectorXd::Ones(n_g);
  parts.kernel = kernel.WithDimension(static_cast<int>(n_f));
  parts.lexicon_version = lexicon_version;
  return TrainOutputWeights(RbpnnModel::FromParts(std::move(parts)));
}

Eigen::VectorXd PatternLayer(const RbpnnModel& model,
                             const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != model.n_features()) {
    throw DomainError("input has " + std::to_string(v.size()) +
                      " features, model expects " +
                      std::to_string(model.n_features()));
  }
  Eigen::VectorXd x1(model.n_samples());
  for (int j = 0; j < model.n_samples(); ++j) {
    const double r = (v.transpose() - model.centroids().row(j)).norm();
    x1[j] = KernelEval(model.kernel(), r / model.beta());
  }
  return x1;
}

Eigen::VectorXd SummationLayer(const RbpnnModel& model,
                               const Eigen::Ref<const Eigen::VectorXd>& x1) {
  if (x1.size() != model.n_samples()) {
    throw DomainError("pattern output must have N_S values");
  }
  return model.summation_weights().transpose() * x1;
}

Attribution Select(const RbpnnModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& x2) {
  const int n_g = model.n_authors();
  if (x2.size() != n_g) throw DomainError("summation output must have N_G values");
  Attribution out;
  out.weighted.resize(n_g);
  out.scores.resize(n_g);
  double total = 0.0;
  for (int k = 0; k < n_g; ++k) {
    out.weighted[k] = model.selector_weights()[k] * x2[k];
    if (out.weighted[k] > out.weighted[out.selected_author]) {
      out.selected_author = k;
    }
    out.scores[k] = std::max(0.0, out.weighted[k]);
    total += out.scores[k];
  }
  for (double& s : out.scores) {
    s = total > 0.0 ? s / total : 1.0 / n_g;
  }
  std::vector<double> sorted = out.scores;
  std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(),
                    std::greater<>());
  out.margin = sorted[0] - sorted[1];
  return out;
}

Eigen::MatrixXd PatternMatrix(const RbpnnModel& model,
                              const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  if (inputs.cols() != model.n_features()) {
    throw DomainError("inputs must have N_F columns");
  }
  Eigen::MatrixXd phi(inputs.rows(), model.n_samples());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    phi.row(i) = PatternLayer(model, inputs.row(i).transpose()).transpose();
  }
  return phi;
}

RbpnnModel TrainOutputWeights(const RbpnnModel& model, double ridge) {
  if (!(ridge > 0.0)) throw DomainError("ridge must be positive");
  const Eigen::MatrixXd phi = PatternMatrix(model, model.centroids());
  const Eigen::MatrixXd y = OneHot(model.labels(), model.n_authors());
  // W = V diag(s / (s^2 + ridge)) U^T Y.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::VectorXd shrink =
      s.array() / (s.array().square() + ridge);
  Eigen::MatrixXd weights =
      svd.matrixV() * shrink.asDiagonal() * (svd.matrixU().transpose() * y);
  if (!weights.allFinite()) {
    throw NumericError("output-layer least squares produced non-finite weights");
  }
  RbpnnModel::Parts parts = model.parts();
  parts.summation_weights = std::move(weights);
  parts.selector_weights = Eigen::VectorXd::Ones(model.n_authors());
  return RbpnnModel::FromParts(std::move(parts));
}

double RidgeObjective(const RbpnnModel& model, const Eigen::MatrixXd& weights,
                      double ridge) {
  const Eigen::MatrixXd phi = PatternMatrix(model, model.centroids());
  const Eigen::MatrixXd y = OneHot(model.labels(), model.n_authors());
  return (phi * weights - y).squaredNorm() + ridge * weights.squaredNorm();
}

namespace {

double WeightedLoss(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& y,
                    const Eigen::MatrixXd& w, const Eigen::VectorXd& selector) {
  const Eigen::MatrixXd out = (phi * w) * selector.asDiagonal();
  return 0.5 * (out - y).squaredNorm() / static_cast<double>(phi.rows());
}

}  // namespace

double TrainingLoss(const RbpnnModel& model) {
  return WeightedLoss(PatternMatrix(model, model.centroids()),
                      OneHot(model.labels(), model.n_authors()),
                      model.summation_weights(), model.selector_weights());
}

Attribution ClassifyFeatures(const RbpnnModel& model,
                             const FeatureVector& features) {
  CheckFrequencies(features, model.n_features());
  if (features.matched_total == 0) {
    Attribution out = Select(model, Eigen::VectorXd::Zero(model.n_authors()));
    out.no_evidence = true;
    return out;
  }
  return Select(model, SummationLayer(model, PatternLayer(model, AsVector(features))));
}

Attribution Classify(const RbpnnModel& model, const GroupLexicon& lexicon,
                     std::string_view raw_text, std::string sample_id) {
  if (lexicon.group_count() != model.n_features()) {
    throw SnapshotIncompatibleError(
        "lexicon has " + std::to_string(lexicon.group_count()) +
        " groups, snapshot " + model.snapshot_id() + " expects " +
        std::to_string(model.n_features()));
  }
  Attribution out = ClassifyFeatures(model, ExtractFeatures(raw_text, lexicon));
  out.sample_id = std::move(sample_id);
  return out;
}

RbpnnModel Refine(const RbpnnModel& model,
                  std::span<const LabeledSample> new_samples, int epochs,
                  double step) {
  if (epochs < 1) throw DomainError("refine needs epochs >= 1");
  if (step < 0.0 || !std::isfinite(step)) {
    throw DomainError("refine step must be a non-negative number");
  }
  if (step == 0.0 && new_samples.empty()) return model;

  RbpnnModel::Parts parts = model.parts();
  const Eigen::Index n_old = parts.centroids.rows();
  const Eigen::Index n_new = static_cast<Eigen::Index>(new_samples.size());
  if (n_new > 0) {
    parts.centroids.conservativeResize(n_old + n_new, Eigen::NoChange);
    parts.summation_weights.conservativeResize(n_old + n_new, Eigen::NoChange);
    for (Eigen::Index i = 0; i < n_new; ++i) {
      const LabeledSample& s = new_samples[i];
      CheckFrequencies(s.features, model.n_features());
      if (s.author < 0 || s.author >= model.n_authors()) {
        throw DomainError("new sample author out of range");
      }
      parts.centroids.row(n_old + i) = AsVector(s.features).transpose();
      parts.summation_weights.row(n_old + i).setZero();
      parts.labels.push_back(s.author);
    }
  }
  if (step == 0.0) return RbpnnModel::FromParts(std::move(parts));

  const RbpnnModel grown = RbpnnModel::FromParts(parts);
  const Eigen::MatrixXd phi = PatternMatrix(grown, grown.centroids());
  const Eigen::MatrixXd y = OneHot(parts.labels, grown.n_authors());
  const double n = static_cast<double>(phi.rows());
  Eigen::MatrixXd& w = parts.summation_weights;
  Eigen::VectorXd& selector = parts.selector_weights;
  double loss = WeightedLoss(phi, y, w, selector);
  double rate = step;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const Eigen::MatrixXd raw = phi * w;
    const Eigen::MatrixXd residual = raw * selector.asDiagonal() - y;
    const Eigen::MatrixXd grad_w =
        (phi.transpose() * (residual * selector.asDiagonal())) / n;
    const Eigen::VectorXd grad_s =
        (residual.array() * raw.array()).colwise().sum().transpose() / n;
    bool accepted = false;
    for (int halving = 0; halving < 40 && !accepted; ++halving) {
      Eigen::MatrixXd w_next = w - rate * grad_w;
      Eigen::VectorXd s_next =
          (selector - rate * grad_s).cwiseMax(kMinSelectorWeight);
      const double next = WeightedLoss(phi, y, w_next, s_next);
      if (next <= loss) {
        w = std::move(w_next);
        selector = std::move(s_next);
        loss = next;
        accepted = true;
      } else {
        rate *= 0.5;
      }
    }
    if (!accepted) break;
  }
  return RbpnnModel::FromParts(std::move(parts));
}

EvaluationRecord Evaluate(const RbpnnModel& model,
                          std::span<const LabeledSample> labeled) {
  EvaluationRecord record;
  record.sample_count = labeled.size();
  const int n_g = model.n_authors();
  std::size_t correct = 0;
  std::size_t false_positives = 0;
  for (const LabeledSample& s : labeled) {
    if (s.author < 0 || s.author >= n_g) {
      throw DomainError("label out of author range");
    }
    const Attribution a = ClassifyFeatures(model, s.features);
    std::vector<double> score_error(n_g);
    std::vector<int> selection_error(n_g);
    for (int k = 0; k < n_g; ++k) {
      const double y = k == s.author ? 1.0 : 0.0;
      score_error[k] = y - a.scores[k];
      selection_error[k] =
          static_cast<int>(y) - (k == a.selected_author ? 1 : 0);
      if (selection_error[k] == -1) ++false_positives;
    }
    if (a.selected_author == s.author) ++correct;
    record.score_error.push_back(std::move(score_error));
    record.selection_error.push_back(std::move(selection_error));
  }
  if (!labeled.empty()) {
    const double n = static_cast<double>(labeled.size());
    record.accuracy = static_cast<double>(correct) / n;
    record.missed_rate = static_cast<double>(labeled.size() - correct) / n;
    record.false_positive_rate =
        static_cast<double>(false_positives) / (n * (n_g - 1));
  }
  return record;
}

}  // namespace authorid
