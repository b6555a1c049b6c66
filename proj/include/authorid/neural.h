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

// Neural primitives shared by the classifier and the adaptive critic:
// radial kernels usable as Parzen windows, Parzen density estimation, and a
// small dense feed-forward network trained by backpropagation.

#ifndef AUTHORID_NEURAL_H_
#define AUTHORID_NEURAL_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace authorid {

enum class KernelKind {
  kGaussian,        // exp(-r^2 / 2)
  kExponentialPnn,  // exp(-r^2 / (2 spread^2))
  kBox,             // 1 for r <= 1, else 0
};

std::string_view KernelKindName(KernelKind kind);
KernelKind ParseKernelKind(std::string_view name);

// Parzen window width h_n = c * n^-alpha. With 0 < alpha < 1 this gives
// h_n -> 0 and n * h_n -> infinity.
struct BandwidthSchedule {
  double c = 1.0;
  double alpha = 0.2;

  double At(std::int64_t n) const;

  bool operator==(const BandwidthSchedule& other) const = default;
};

class KernelSpec {
 public:
  // Throws DomainError unless spread > 0, dimension >= 1, c > 0 and
  // 0 < alpha < 1.
  explicit KernelSpec(KernelKind kind = KernelKind::kGaussian,
                      double spread = 1.0, int dimension = 1,
                      BandwidthSchedule schedule = {});

  KernelKind kind() const { return kind_; }
  double spread() const { return spread_; }
  int dimension() const { return dimension_; }
  const BandwidthSchedule& schedule() const { return schedule_; }

  KernelSpec WithDimension(int dimension) const;

  // Unnormalized radial profile, equal to 1 at r = 0.
  double Profile(double r) const;

  // Integral of Profile(|x|) over R^d.
  double ProfileMass() const;

  // Density K(x) = Profile(|x|) / ProfileMass(); integrates to 1 over R^d.
  double Density(double radius) const { return Profile(radius) / mass_; }

  bool operator==(const KernelSpec& other) const = default;

 private:
  KernelKind kind_;
  double spread_;
  int dimension_;
  BandwidthSchedule schedule_;
  double mass_;
};

// Radial profile of `spec` at distance r >= 0.
double KernelEval(const KernelSpec& spec, double r);

// Parzen window estimate at `x` from the rows of `samples` (n x d), with
// h = spec.schedule().At(n_index). Requires n_index == samples.rows() and
// d == spec.dimension().
double ParzenEstimate(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                      const Eigen::Ref<const Eigen::VectorXd>& x,
                      std::int64_t n_index, const KernelSpec& spec);

struct ParzenReport {
  // Midpoint product quadrature of K over [-extent, extent]^d, with cells
  // cut by a compact support boundary refined.
  double integral_of_K = 0.0;
  // Largest K value seen on the quadrature grid and at the origin.
  double sup_K = 0.0;
  // |x| K(x) is non-increasing along a ray over the outer half of the grid
  // and negligible at its boundary.
  bool tail_decay_ok = false;
  bool h_n_to_zero = false;
  bool n_h_n_to_inf = false;

  bool Passed(double integral_tolerance = 1e-6) const;
};

// Numerically checks the window conditions for `spec` on a grid of half-width
// `grid_extent` (d <= 3) and the bandwidth limits up to `n_max` (>= 10).
// For compact-support kernels use an integer extent so cell edges fall on
// the support boundary.
ParzenReport CheckParzenConditions(const KernelSpec& spec, double grid_extent,
                                   std::int64_t n_max);

enum class Activation { kSigmoid, kTanh, kIdentity };

// Dense feed-forward network. Layer l maps layer_sizes[l] inputs to
// layer_sizes[l + 1] outputs with a weight matrix whose last column is the
// bias. The activation applies to every layer, including the output.
class DenseNet {
 public:
  // Zero-initialized weights.
  DenseNet(std::vector<int> layer_sizes, Activation activation,
           double learning_rate);
  DenseNet(std::vector<int> layer_sizes, std::vector<Eigen::MatrixXd> weights,
           Activation activation, double learning_rate);

  // Weights drawn uniformly from [-scale, scale].
  static DenseNet Random(std::vector<int> layer_sizes, Activation activation,
                         double learning_rate, std::mt19937_64& rng,
                         double scale = 0.5);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  Activation activation() const { return activation_; }
  double learning_rate() const { return learning_rate_; }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  std::size_t parameter_count() const;

  DenseNet WithWeights(std::vector<Eigen::MatrixXd> weights) const;

  bool operator==(const DenseNet& other) const;

 private:
  std::vector<int> layer_sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  Activation activation_;
  double learning_rate_;
};

struct ForwardPass {
  // activations[0] is the input, activations.back() the output.
  std::vector<Eigen::VectorXd> activations;

  const Eigen::VectorXd& output() const { return activations.back(); }
};

ForwardPass Forward(const DenseNet& net,
                    const Eigen::Ref<const Eigen::VectorXd>& input);

// Gradient of 0.5 * |error|^2 with respect to every weight, where `error`
// is d(loss)/d(output), i.e. output - target.
std::vector<Eigen::MatrixXd> Backprop(const DenseNet& net,
                                      const ForwardPass& pass,
                                      const Eigen::Ref<const Eigen::VectorXd>& error);

// One gradient-descent step: w -= learning_rate * d(0.5 |error|^2)/dw.
DenseNet BackpropStep(const DenseNet& net,
                      const Eigen::Ref<const Eigen::VectorXd>& input,
                      const Eigen::Ref<const Eigen::VectorXd>& error);

// Max over weights of |analytic - numeric| / max(|analytic|, |numeric|,
// 1e-6), using fourth-order central differences of 0.5 |output - target|^2.
double GradientCheck(const DenseNet& net,
                     const Eigen::Ref<const Eigen::VectorXd>& input,
                     const Eigen::Ref<const Eigen::VectorXd>& target,
                     double step = 1e-3);

}  // namespace authorid

#endif  // AUTHORID_NEURAL_H_
