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

#include <algorithm>
#include <cmath>

#include "authorid/errors.h"
#include "authorid/neural.h"

namespace authorid {
namespace {

void CheckLayout(const std::vector<int>& sizes,
                 const std::vector<Eigen::MatrixXd>& weights) {
  if (sizes.size() < 2) throw DomainError("a network needs >= 2 layers");
  for (int n : sizes) {
    if (n < 1) throw DomainError("layer sizes must be positive");
  }
  if (weights.size() != sizes.size() - 1) {
    throw DomainError("one weight matrix per layer transition required");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != sizes[l + 1] || weights[l].cols() != sizes[l] + 1) {
      throw DomainError("weight matrix " + std::to_string(l) +
                        " has the wrong shape");
    }
    if (!weights[l].allFinite()) throw DomainError("weights must be finite");
  }
}

double Activate(Activation a, double u) {
  switch (a) {
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-u));
    case Activation::kTanh:
      return std::tanh(u);
    case Activation::kIdentity:
      return u;
  }
  return u;
}

// Derivative expressed through the activation value f(u).
double ActivateSlope(Activation a, double f) {
  switch (a) {
    case Activation::kSigmoid:
      return f * (1.0 - f);
    case Activation::kTanh:
      return 1.0 - f * f;
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

std::vector<Eigen::MatrixXd> ZeroWeights(const std::vector<int>& sizes) {
  std::vector<Eigen::MatrixXd> weights;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    weights.push_back(Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l] + 1));
  }
  return weights;
}

}  // namespace

DenseNet::DenseNet(std::vector<int> layer_sizes, Activation activation,
                   double learning_rate)
    : DenseNet(layer_sizes,
               layer_sizes.size() < 2 ? std::vector<Eigen::MatrixXd>{}
                                      : ZeroWeights(layer_sizes),
               activation, learning_rate) {}

DenseNet::DenseNet(std::vector<int> layer_sizes,
                   std::vector<Eigen::MatrixXd> weights, Activation activation,
                   double learning_rate)
    : layer_sizes_(std::move(layer_sizes)),
      weights_(std::move(weights)),
      activation_(activation),
      learning_rate_(learning_rate) {
  CheckLayout(layer_sizes_, weights_);
  if (!(learning_rate_ > 0.0) || !std::isfinite(learning_rate_)) {
    throw DomainError("learning rate must be positive");
  }
}

DenseNet DenseNet::Random(std::vector<int> layer_sizes, Activation activation,
                          double learning_rate, std::mt19937_64& rng,
                          double scale) {
  DenseNet net(std::move(layer_sizes), activation, learning_rate);
  std::uniform_real_distribution<double> uniform(-scale, scale);
  for (Eigen::MatrixXd& w : net.weights_) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = uniform(rng);
    }
  }
  return net;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const Eigen::MatrixXd& w : weights_) n += w.size();
  return n;
}

DenseNet DenseNet::WithWeights(std::vector<Eigen::MatrixXd> weights) const {
  return DenseNet(layer_sizes_, std::move(weights), activation_,
                  learning_rate_);
}

bool DenseNet::operator==(const DenseNet& other) const {
  if (layer_sizes_ != other.layer_sizes_ || activation_ != other.activation_ ||
      learning_rate_ != other.learning_rate_) {
    return false;
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l] != other.weights_[l]) return false;
  }
  return true;
}

ForwardPass Forward(const DenseNet& net,
                    const Eigen::Ref<const Eigen::VectorXd>& input) {
  if (input.size() != net.input_size()) {
    throw DomainError("input has " + std::to_string(input.size()) +
                      " values, network expects " +
                      std::to_string(net.input_size()));
  }
  ForwardPass pass;
  pass.activations.reserve(net.layer_sizes().size());
  pass.activations.emplace_back(input);
  for (const Eigen::MatrixXd& w : net.weights()) {
    const Eigen::VectorXd& x = pass.activations.back();
    const Eigen::Index in = w.cols() - 1;
    Eigen::VectorXd u = w.leftCols(in) * x + w.col(in);
    pass.activations.emplace_back(
        u.unaryExpr([&](double v) { return Activate(net.activation(), v); }));
  }
  return pass;
}

std::vector<Eigen::MatrixXd> Backprop(
    const DenseNet& net, const ForwardPass& pass,
    const Eigen::Ref<const Eigen::VectorXd>& error) {
  if (error.size() != net.output_size()) {
    throw DomainError("error vector length must equal the output size");
  }
  const auto& weights = net.weights();
  std::vector<Eigen::MatrixXd> grads(weights.size());
  // delta = d(loss)/d(weighted input) of the current layer.
  Eigen::VectorXd delta = error;
  for (std::size_t l = weights.size(); l-- > 0;) {
    const Eigen::VectorXd& out = pass.activations[l + 1];
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      delta[i] *= ActivateSlope(net.activation(), out[i]);
    }
    const Eigen::VectorXd& in = pass.activations[l];
    const Eigen::Index n_in = in.size();
    grads[l].resize(weights[l].rows(), n_in + 1);
    grads[l].leftCols(n_in) = delta * in.transpose();
    grads[l].col(n_in) = delta;
    if (l > 0) delta = weights[l].leftCols(n_in).transpose() * delta;
  }
  return grads;
}

DenseNet BackpropStep(const DenseNet& net,
                      const Eigen::Ref<const Eigen::VectorXd>& input,
                      const Eigen::Ref<const Eigen::VectorXd>& error) {
  const ForwardPass pass = Forward(net, input);
  const std::vector<Eigen::MatrixXd> grads = Backprop(net, pass, error);
  std::vector<Eigen::MatrixXd> weights = net.weights();
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] -= net.learning_rate() * grads[l];
  }
  return net.WithWeights(std::move(weights));
}

double GradientCheck(const DenseNet& net,
                     const Eigen::Ref<const Eigen::VectorXd>& input,
                     const Eigen::Ref<const Eigen::VectorXd>& target,
                     double step) {
  if (target.size() != net.output_size()) {
    throw DomainError("target length must equal the output size");
  }
  auto loss = [&](const DenseNet& candidate) {
    return 0.5 * (Forward(candidate, input).output() - target).squaredNorm();
  };
  const ForwardPass pass = Forward(net, input);
  const std::vector<Eigen::MatrixXd> analytic =
      Backprop(net, pass, pass.output() - target);

  double worst = 0.0;
  std::vector<Eigen::MatrixXd> weights = net.weights();
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index j = 0; j < weights[l].cols(); ++j) {
      for (Eigen::Index i = 0; i < weights[l].rows(); ++i) {
        const double saved = weights[l](i, j);
        auto at = [&](double offset) {
          weights[l](i, j) = saved + offset;
          return loss(net.WithWeights(weights));
        };
        const double numeric = (8.0 * (at(step) - at(-step)) -
                                (at(2.0 * step) - at(-2.0 * step))) /
                               (12.0 * step);
        weights[l](i, j) = saved;
        const double a = analytic[l](i, j);
        const double scale =
            std::max({std::abs(a), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(a - numeric) / scale);
      }
    }
  }
  return worst;
}

}  // namespace authorid
