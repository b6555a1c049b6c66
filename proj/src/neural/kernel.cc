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
#include <array>
#include <cmath>
#include <numbers>

#include "authorid/errors.h"
#include "authorid/neural.h"

namespace authorid {

std::string_view KernelKindName(KernelKind kind) {
  switch (kind) {
    case KernelKind::kGaussian:
      return "gaussian";
    case KernelKind::kExponentialPnn:
      return "exponential_pnn";
    case KernelKind::kBox:
      return "box";
  }
  return "unknown";
}

KernelKind ParseKernelKind(std::string_view name) {
  if (name == "gaussian") return KernelKind::kGaussian;
  if (name == "exponential_pnn") return KernelKind::kExponentialPnn;
  if (name == "box") return KernelKind::kBox;
  throw DomainError("unknown kernel '" + std::string(name) + "'");
}

double BandwidthSchedule::At(std::int64_t n) const {
  if (n < 1) throw DomainError("bandwidth needs n >= 1");
  return c * std::pow(static_cast<double>(n), -alpha);
}

namespace {

double UnitBallVolume(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

}  // namespace

KernelSpec::KernelSpec(KernelKind kind, double spread, int dimension,
                       BandwidthSchedule schedule)
    : kind_(kind), spread_(spread), dimension_(dimension), schedule_(schedule) {
  if (!(spread > 0.0) || !std::isfinite(spread)) {
    throw DomainError("kernel spread must be positive");
  }
  if (dimension < 1) throw DomainError("kernel dimension must be >= 1");
  if (!(schedule.c > 0.0) || !std::isfinite(schedule.c)) {
    throw DomainError("bandwidth constant c must be positive");
  }
  if (!(schedule.alpha > 0.0 && schedule.alpha < 1.0)) {
    throw DomainError("bandwidth exponent alpha must lie in (0, 1)");
  }
  const double d = dimension;
  switch (kind) {
    case KernelKind::kGaussian:
      mass_ = std::pow(2.0 * std::numbers::pi, d / 2.0);
      break;
    case KernelKind::kExponentialPnn:
      mass_ = std::pow(2.0 * std::numbers::pi * spread * spread, d / 2.0);
      break;
    case KernelKind::kBox:
      mass_ = UnitBallVolume(dimension);
      break;
  }
}

KernelSpec KernelSpec::WithDimension(int dimension) const {
  return KernelSpec(kind_, spread_, dimension, schedule_);
}

double KernelSpec::Profile(double r) const {
  switch (kind_) {
    case KernelKind::kGaussian:
      return std::exp(-0.5 * r * r);
    case KernelKind::kExponentialPnn:
      return std::exp(-(r * r) / (2.0 * spread_ * spread_));
    case KernelKind::kBox:
      return r <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double KernelSpec::ProfileMass() const { return mass_; }

double KernelEval(const KernelSpec& spec, double r) {
  if (r < 0.0) throw DomainError("kernel radius must be non-negative");
  return spec.Profile(r);
}

double ParzenEstimate(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                      const Eigen::Ref<const Eigen::VectorXd>& x,
                      std::int64_t n_index, const KernelSpec& spec) {
  if (samples.rows() == 0) throw DomainError("Parzen estimate needs samples");
  if (n_index != samples.rows()) {
    throw DomainError("n_index must equal the number of samples");
  }
  if (samples.cols() != spec.dimension() || x.size() != spec.dimension()) {
    throw DomainError("sample dimension does not match kernel dimension");
  }
  const double h = spec.schedule().At(n_index);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double r = (x.transpose() - samples.row(i)).norm() / h;
    sum += spec.Density(r);
  }
  return sum / (static_cast<double>(n_index) * std::pow(h, spec.dimension()));
}

bool ParzenReport::Passed(double integral_tolerance) const {
  return std::abs(integral_of_K - 1.0) <= integral_tolerance &&
         std::isfinite(sup_K) && tail_decay_ok && h_n_to_zero && n_h_n_to_inf;
}

namespace {

// Cells per unit length of the quadrature grid, coarser in higher
// dimension to bound the evaluation count.
int CellsPerUnit(int d) {
  switch (d) {
    case 1:
      return 256;
    case 2:
      return 64;
    default:
      return 16;
  }
}

// Refinement depth for cells that straddle a discontinuity of the profile.
int RefineDepth(int d) { return d == 2 ? 12 : (d == 3 ? 5 : 0); }

// Integral of the density over the cube centred at c with side `width`.
// Cells cut by the unit sphere of a compact-support kernel are split into
// 2^d children until `depth` runs out; other cells use the midpoint rule.
double CellMass(const KernelSpec& spec, const std::array<double, 3>& c,
                double width, int depth) {
  const int d = spec.dimension();
  const double volume = std::pow(width, d);
  double near = 0.0;
  double far = 0.0;
  double centre = 0.0;
  for (int a = 0; a < d; ++a) {
    const double lo = std::abs(c[a]) - 0.5 * width;
    near += lo > 0.0 ? lo * lo : 0.0;
    far += (std::abs(c[a]) + 0.5 * width) * (std::abs(c[a]) + 0.5 * width);
    centre += c[a] * c[a];
  }
  const bool straddles = spec.kind() == KernelKind::kBox && near <= 1.0 &&
                         far > 1.0;
  if (!straddles) return spec.Density(std::sqrt(centre)) * volume;
  if (depth == 0) {
    // Interior share of a leaf cut by the sphere, taken along the normal.
    const double r = std::sqrt(centre);
    double span = 0.0;
    for (int a = 0; a < d; ++a) span += std::abs(c[a]) / r * width;
    const double inside = std::clamp(0.5 + (1.0 - r) / span, 0.0, 1.0);
    return spec.Density(0.0) * inside * volume;
  }
  double total = 0.0;
  for (int child = 0; child < (1 << d); ++child) {
    std::array<double, 3> sub = c;
    for (int a = 0; a < d; ++a) {
      sub[a] += ((child >> a) & 1 ? 0.25 : -0.25) * width;
    }
    total += CellMass(spec, sub, 0.5 * width, depth - 1);
  }
  return total;
}

}  // namespace

ParzenReport CheckParzenConditions(const KernelSpec& spec, double grid_extent,
                                   std::int64_t n_max) {
  if (!(grid_extent > 0.0)) throw DomainError("grid extent must be positive");
  if (n_max < 10) throw DomainError("n_max must be >= 10");
  const int d = spec.dimension();
  if (d > 3) throw DomainError("quadrature supports d <= 3");

  ParzenReport report;
  const auto cells = static_cast<std::int64_t>(
      std::ceil(2.0 * grid_extent * CellsPerUnit(d)));
  const double width = 2.0 * grid_extent / static_cast<double>(cells);
  std::vector<double> mid(cells);
  for (std::int64_t i = 0; i < cells; ++i) {
    mid[i] = -grid_extent + (static_cast<double>(i) + 0.5) * width;
  }

  double sum = 0.0;
  double sup = spec.Density(0.0);
  const std::int64_t cy = d >= 2 ? cells : 1;
  const std::int64_t cz = d >= 3 ? cells : 1;
  const int depth = RefineDepth(d);
  for (std::int64_t k = 0; k < cz; ++k) {
    for (std::int64_t j = 0; j < cy; ++j) {
      double row = 0.0;
      for (std::int64_t i = 0; i < cells; ++i) {
        const std::array<double, 3> c = {mid[i], d >= 2 ? mid[j] : 0.0,
                                         d >= 3 ? mid[k] : 0.0};
        const double mass = CellMass(spec, c, width, depth);
        row += mass;
        sup = std::max(sup, spec.Density(std::sqrt(c[0] * c[0] + c[1] * c[1] +
                                                   c[2] * c[2])));
      }
      sum += row;
    }
  }
  report.integral_of_K = sum;
  report.sup_K = sup;

  // |x| K(x) along the first axis from extent/2 to extent.
  constexpr int kRaySteps = 256;
  bool non_increasing = true;
  double previous = INFINITY;
  double last = 0.0;
  for (int s = 0; s <= kRaySteps; ++s) {
    const double r = grid_extent * (0.5 + 0.5 * s / kRaySteps);
    const double value = r * spec.Density(r);
    if (value > previous) non_increasing = false;
    previous = value;
    last = value;
  }
  report.tail_decay_ok = non_increasing && last <= 1e-6 * std::max(sup, 1.0);

  // Bandwidth limits: analytic from (c, alpha), confirmed on n = 10^k.
  const BandwidthSchedule& schedule = spec.schedule();
  bool h_decreasing = true;
  bool nh_increasing = true;
  double prev_h = schedule.At(1);
  double prev_nh = prev_h;
  std::vector<std::int64_t> checkpoints;
  for (std::int64_t n = 10; n < n_max; n *= 10) checkpoints.push_back(n);
  checkpoints.push_back(n_max);
  for (std::int64_t n : checkpoints) {
    const double h = schedule.At(n);
    const double nh = static_cast<double>(n) * h;
    h_decreasing = h_decreasing && h < prev_h;
    nh_increasing = nh_increasing && nh > prev_nh;
    prev_h = h;
    prev_nh = nh;
  }
  report.h_n_to_zero = schedule.alpha > 0.0 && h_decreasing;
  report.n_h_n_to_inf = schedule.alpha < 1.0 && nh_increasing;
  return report;
}

}  // namespace authorid
