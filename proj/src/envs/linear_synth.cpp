// Copyright 2026 The batchpref Authors
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

#include "core/rng.hpp"
#include "envs/environment.hpp"

namespace batchpref {
namespace {

constexpr std::size_t kDim = 2;
constexpr std::size_t kHorizon = 5;
constexpr double kSpectralRadius = 0.9;
constexpr double kFeatureClip = 4.0;

class LinearSynthEnv final : public Environment {
 public:
  LinearSynthEnv(std::size_t feature_dim, std::uint64_t seed) : d_(feature_dim), seed_(seed) {
    Require(feature_dim >= 1, ErrorCode::kInvalidInput, "feature_dim must be >= 1");
    Rng rng(DeriveSeed(seed, {0x11}));
    a_.resize(kDim, kDim);
    b_.resize(kDim, kDim);
    for (Eigen::Index i = 0; i < a_.size(); ++i) a_.data()[i] = StandardNormal(rng);
    for (Eigen::Index i = 0; i < b_.size(); ++i) b_.data()[i] = StandardNormal(rng) * 0.5;
    const double radius = a_.eigenvalues().cwiseAbs().maxCoeff();
    if (radius > 0.0) a_ *= kSpectralRadius / radius;
    forms_.reserve(d_);
    for (std::size_t i = 0; i < d_; ++i) {
      Matrix g(kDim, kDim);
      for (Eigen::Index j = 0; j < g.size(); ++j) g.data()[j] = StandardNormal(rng);
      forms_.push_back(0.5 * g * g.transpose());
    }
  }

  std::string id() const override { return "linear_synth"; }
  std::size_t dim_x() const override { return kDim; }
  std::size_t dim_u() const override { return kDim; }
  std::size_t horizon() const override { return kHorizon; }
  std::size_t feature_dim() const override { return d_; }

  std::vector<std::pair<double, double>> action_bounds() const override {
    return std::vector<std::pair<double, double>>(kDim, {-1.0, 1.0});
  }

  Vector default_initial_state() const override {
    Vector x0(2);
    x0 << 0.5, -0.5;
    return x0;
  }

  Vector Step(const Vector& s, const Vector& u) const override { return a_ * s + b_ * u; }

  Vector Features(const RowMatrix& states, const RowMatrix& /*actions*/) const override {
    Vector f = Vector::Zero(static_cast<Eigen::Index>(d_));
    const Eigen::Index steps = states.rows() - 1;
    for (std::size_t i = 0; i < d_; ++i) {
      double acc = 0.0;
      for (Eigen::Index t = 1; t <= steps; ++t) {
        const Vector x = states.row(t).transpose();
        acc += x.dot(forms_[i] * x);
      }
      f[static_cast<Eigen::Index>(i)] = std::clamp(acc / static_cast<double>(steps), 0.0, kFeatureClip);
    }
    return f;
  }

 private:
  std::size_t d_;
  std::uint64_t seed_;
  Matrix a_;
  Matrix b_;
  std::vector<Matrix> forms_;
};

}  // namespace

std::unique_ptr<Environment> MakeLinearSynthEnv(std::size_t feature_dim, std::uint64_t seed) {
  return std::make_unique<LinearSynthEnv>(feature_dim, seed);
}

}  // namespace batchpref
