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

// Radial basis probabilistic neural network for author attribution.
//
// Layers: N_F inputs (group frequencies), N_S pattern units (one per
// training text, centered on its frequency vector), N_G summation units (one
// per author), and a weighted maximum-probability selector.
//
//   pattern    x1_j = f(|v - c_j| / beta)
//   summation  x2_k = sum_j W_jk x1_j
//   selector   s_k  = selector_k * x2_k, author = argmax_k s_k
//
// Models are immutable values; every training operation returns a new model
// with a new snapshot id.

#ifndef AUTHORID_RBPNN_H_
#define AUTHORID_RBPNN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "authorid/lexicon.h"
#include "authorid/neural.h"

namespace authorid {

using AuthorId = int;

struct LabeledSample {
  FeatureVector features;  // frequencies must be filled
  AuthorId author = 0;
};

inline constexpr double kDefaultRidge = 1e-6;

class RbpnnModel {
 public:
  struct Parts {
    Eigen::MatrixXd centroids;          // N_S x N_F
    std::vector<AuthorId> labels;       // N_S, author of each pattern unit
    double beta = 1.0;
    Eigen::MatrixXd summation_weights;  // N_S x N_G
    Eigen::VectorXd selector_weights;   // N_G
    KernelSpec kernel;
    std::uint64_t lexicon_version = 0;
  };

  // Validates every dimension and positivity invariant; throws DomainError.
  static RbpnnModel FromParts(Parts parts);

  int n_features() const { return static_cast<int>(parts_.centroids.cols()); }
  int n_samples() const { return static_cast<int>(parts_.centroids.rows()); }
  int n_authors() const {
    return static_cast<int>(parts_.selector_weights.size());
  }
  const Eigen::MatrixXd& centroids() const { return parts_.centroids; }
  const std::vector<AuthorId>& labels() const { return parts_.labels; }
  double beta() const { return parts_.beta; }
  const Eigen::MatrixXd& summation_weights() const {
    return parts_.summation_weights;
  }
  const Eigen::VectorXd& selector_weights() const {
    return parts_.selector_weights;
  }
  const KernelSpec& kernel() const { return parts_.kernel; }
  std::uint64_t lexicon_version() const { return parts_.lexicon_version; }
  // Content hash of all fields, "snap-" followed by 16 hex digits.
  const std::string& snapshot_id() const { return snapshot_id_; }

  const Parts& parts() const { return parts_; }

  bool operator==(const RbpnnModel& other) const;

 private:
  explicit RbpnnModel(Parts parts);

  Parts parts_;
  std::string snapshot_id_;
};

struct Attribution {
  std::string sample_id;
  std::vector<double> scores;    // normalized, non-negative, sums to 1
  std::vector<double> weighted;  // selector_k * x2_k before clamping
  AuthorId selected_author = 0;
  double margin = 0.0;           // top-1 minus top-2 normalized score
  bool no_evidence = false;      // text matched no lexicon word

  bool operator==(const Attribution& other) const = default;
};

struct EvaluationRecord {
  // y - scores per sample and author.
  std::vector<std::vector<double>> score_error;
  // y - onehot(selected): 0 correct, +1 missed, -1 false positive.
  std::vector<std::vector<int>> selection_error;
  std::size_t sample_count = 0;
  double accuracy = 0.0;
  // Share of samples whose true author was not selected.
  double missed_rate = 0.0;
  // Share of (sample, other author) slots marked -1.
  double false_positive_rate = 0.0;
};

// Median pairwise Euclidean distance between rows; falls back to the mean
// positive distance, then 1.0, when the median is zero.
double DefaultBeta(const Eigen::MatrixXd& centroids);

// One pattern unit per sample. N_G is `n_authors`, or 1 + the largest label
// when 0. Every author needs at least one sample and N_G >= 2. Output weights
// are fitted with TrainOutputWeights.
RbpnnModel BuildModel(std::span<const LabeledSample> training,
                      std::optional<double> beta = std::nullopt,
                      const KernelSpec& kernel = KernelSpec(),
                      int n_authors = 0, std::uint64_t lexicon_version = 0);

Eigen::VectorXd PatternLayer(const RbpnnModel& model,
                             const Eigen::Ref<const Eigen::VectorXd>& v);
Eigen::VectorXd SummationLayer(const RbpnnModel& model,
                               const Eigen::Ref<const Eigen::VectorXd>& x1);
Attribution Select(const RbpnnModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& x2);

// Pattern responses of each row of `inputs` (N x N_F) -> N x N_S.
Eigen::MatrixXd PatternMatrix(const RbpnnModel& model,
                              const Eigen::Ref<const Eigen::MatrixXd>& inputs);

// Solves min |Phi W - Y|^2 + ridge |W|^2 over the stored training data and
// resets the selector weights to 1. Throws NumericError if the solution is
// not finite.
RbpnnModel TrainOutputWeights(const RbpnnModel& model,
                              double ridge = kDefaultRidge);

// |Phi W - Y|^2 + ridge |W|^2 for the model's own training data and `weights`.
double RidgeObjective(const RbpnnModel& model, const Eigen::MatrixXd& weights,
                      double ridge = kDefaultRidge);

// Mean over stored samples of 0.5 |selector * (Phi W) - y|^2.
double TrainingLoss(const RbpnnModel& model);

Attribution ClassifyFeatures(const RbpnnModel& model,
                             const FeatureVector& features);

// Tokenize, count against a read-only lexicon, featurize, attribute. Throws
// SnapshotIncompatibleError when the lexicon's group count differs from N_F.
Attribution Classify(const RbpnnModel& model, const GroupLexicon& lexicon,
                     std::string_view raw_text, std::string sample_id = "");

// Appends `new_samples` as pattern units (zero output weights) and runs
// `epochs` full-batch gradient steps on the summation and selector weights
// against the squared error over all stored samples. A step that would
// raise the loss is halved until it does not. With step 0 and no new
// samples the input model is returned unchanged.
RbpnnModel Refine(const RbpnnModel& model,
                  std::span<const LabeledSample> new_samples, int epochs,
                  double step);

EvaluationRecord Evaluate(const RbpnnModel& model,
                          std::span<const LabeledSample> labeled);

}  // namespace authorid

#endif  // AUTHORID_RBPNN_H_
