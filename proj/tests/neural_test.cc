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

#include <cmath>
#include <random>

#include "doctest.h"

#include "authorid/errors.h"
#include "authorid/neural.h"
#include "support/oracles.h"

namespace authorid {
namespace {

TEST_SUITE("neural") {

TEST_CASE("kernel specs validate their parameters") {
  CHECK_THROWS_AS(KernelSpec(KernelKind::kGaussian, 0.0), DomainError);
  CHECK_THROWS_AS(KernelSpec(KernelKind::kGaussian, 1.0, 0), DomainError);
  CHECK_THROWS_AS(KernelSpec(KernelKind::kGaussian, 1.0, 1, {1.0, 1.0}),
                  DomainError);
  CHECK_THROWS_AS(KernelSpec(KernelKind::kGaussian, 1.0, 1, {0.0, 0.5}),
                  DomainError);
  CHECK_THROWS_AS(KernelEval(KernelSpec(), -1.0), DomainError);
  CHECK(ParseKernelKind(KernelKindName(KernelKind::kBox)) == KernelKind::kBox);
  CHECK_THROWS_AS(ParseKernelKind("cosine"), DomainError);
}

TEST_CASE("profiles peak at the origin") {
  for (KernelKind kind :
       {KernelKind::kGaussian, KernelKind::kExponentialPnn, KernelKind::kBox}) {
    const KernelSpec k(kind, 0.7);
    CHECK(KernelEval(k, 0.0) == 1.0);
    CHECK(KernelEval(k, 0.5) <= 1.0);
    CHECK(KernelEval(k, 5.0) < 1e-3);
  }
  CHECK(KernelEval(KernelSpec(KernelKind::kExponentialPnn, 2.0), 2.0) ==
        doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("shipped kernels integrate to one") {
  for (int d : {1, 2}) {
    for (KernelKind kind :
         {KernelKind::kGaussian, KernelKind::kExponentialPnn, KernelKind::kBox}) {
      CAPTURE(d);
      CAPTURE(KernelKindName(kind));
      const KernelSpec k(kind, 1.0, d);
      const double extent = kind == KernelKind::kBox ? 2.0 : 12.0;
      const ParzenReport r = CheckParzenConditions(k, extent, 1000000);
      CHECK(std::abs(r.integral_of_K - 1.0) < 1e-6);
      CHECK(r.Passed());
    }
  }
}

TEST_CASE("bandwidth schedule satisfies the limits") {
  const BandwidthSchedule s;
  CHECK(s.At(1) == doctest::Approx(1.0));
  CHECK(s.At(100000) < s.At(1000));
  CHECK(100000 * s.At(100000) > 1000 * s.At(1000));
  CHECK_THROWS_AS(s.At(0), DomainError);
}

TEST_CASE("Parzen estimate error shrinks with n") {
  double previous = 1e9;
  for (std::int64_t n : {100, 1000, 10000}) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      mean += testing::ParzenNormalError(n, seed);
    }
    mean /= 20.0;
    CHECK(mean < previous);
    previous = mean;
  }
}

TEST_CASE("Parzen estimate checks its arguments") {
  Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(3, 2);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(ParzenEstimate(samples, x, 3, KernelSpec()), DomainError);
  const KernelSpec k2(KernelKind::kGaussian, 1.0, 2);
  CHECK_THROWS_AS(ParzenEstimate(samples, x, 4, k2), DomainError);
  CHECK(ParzenEstimate(samples, x, 3, k2) > 0.0);
}

TEST_CASE("dense net shapes and bias columns") {
  std::mt19937_64 rng(3);
  const DenseNet net =
      DenseNet::Random({4, 6, 2}, Activation::kTanh, 0.1, rng);
  REQUIRE(net.weights().size() == 2);
  CHECK(net.weights()[0].rows() == 6);
  CHECK(net.weights()[0].cols() == 5);
  CHECK(net.weights()[1].cols() == 7);
  CHECK(net.parameter_count() == 6 * 5 + 2 * 7);
  CHECK_THROWS_AS(DenseNet({4}, Activation::kTanh, 0.1), DomainError);
  CHECK_THROWS_AS(Forward(net, Eigen::VectorXd::Zero(3)), DomainError);
  const ForwardPass pass = Forward(net, Eigen::VectorXd::Ones(4));
  CHECK(pass.activations.size() == 3);
  CHECK(pass.output().size() == 2);
}

TEST_CASE("zero weights give the activation of zero") {
  const DenseNet net({3, 2}, Activation::kSigmoid, 0.1);
  const ForwardPass pass = Forward(net, Eigen::VectorXd::Ones(3));
  CHECK(pass.output()[0] == doctest::Approx(0.5));
}

TEST_CASE("backprop matches finite differences") {
  std::mt19937_64 rng(11);
  for (Activation a :
       {Activation::kSigmoid, Activation::kTanh, Activation::kIdentity}) {
    const DenseNet net = DenseNet::Random({5, 7, 4, 3}, a, 0.1, rng, 0.8);
    Eigen::VectorXd x = Eigen::VectorXd::Random(5);
    Eigen::VectorXd t = Eigen::VectorXd::Random(3);
    CHECK(GradientCheck(net, x, t) < 1e-4);
  }
}

TEST_CASE("a small enough step lowers the loss") {
  std::mt19937_64 rng(5);
  const DenseNet net =
      DenseNet::Random({3, 8, 2}, Activation::kTanh, 0.05, rng);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.3);
  const Eigen::VectorXd t = Eigen::VectorXd::Constant(2, 0.5);
  auto loss = [&](const DenseNet& n) {
    return 0.5 * (Forward(n, x).output() - t).squaredNorm();
  };
  DenseNet current = net;
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd error = Forward(current, x).output() - t;
    const DenseNet next = BackpropStep(current, x, error);
    CHECK(loss(next) <= loss(current));
    current = next;
  }
  CHECK(loss(current) < loss(net));
}

}  // TEST_SUITE

}  // namespace
}  // namespace authorid
