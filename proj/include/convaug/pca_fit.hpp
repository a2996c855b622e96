// Copyright 2026 The convaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "convaug/augment.hpp"
#include "convaug/core/error.hpp"
#include "convaug/core/image.hpp"

namespace convaug {

/// Streaming RGB covariance on the [0, 1] intensity scale.
class RgbCovariance {
 public:
  void add(const ImageBuffer& img) {
    const auto px = img.data();
    for (std::size_t i = 0; i < px.size(); i += 3) {
      const Eigen::Vector3d v(px[i] / 255.0, px[i + 1] / 255.0, px[i + 2] / 255.0);
      sum_ += v;
      outer_ += v * v.transpose();
      ++count_;
    }
  }

  std::size_t count() const noexcept { return count_; }

  /// Population covariance.
  Eigen::Matrix3d covariance() const {
    if (count_ == 0) throw InvalidArgument("no pixels accumulated");
    const double n = static_cast<double>(count_);
    const Eigen::Vector3d mean = sum_ / n;
    return outer_ / n - mean * mean.transpose();
  }

 private:
  Eigen::Vector3d sum_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3d outer_ = Eigen::Matrix3d::Zero();
  std::size_t count_ = 0;
};

/// Eigen-decomposition of the RGB covariance as a LightingSpec: eigenvalues
/// descending, unit eigenvector columns, each column's sign chosen so its
/// largest-magnitude component is negative (matching the ImageNet basis).
inline LightingSpec fit_pca_lighting(const RgbCovariance& cov, double alpha_std = 0.1) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov.covariance());
  if (solver.info() != Eigen::Success) throw Error("RGB covariance eigen-decomposition failed");
  LightingSpec s;
  s.alpha_std = alpha_std;
  for (int j = 0; j < 3; ++j) {
    const int src = 2 - j;  // Eigen sorts ascending
    Eigen::Vector3d v = solver.eigenvectors().col(src).normalized();
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] > 0) v = -v;
    s.eigenvalues[j] = std::max(0.0, solver.eigenvalues()[src]);
    for (int c = 0; c < 3; ++c) s.eigenvectors[c][j] = v[c];
  }
  return s;
}

inline LightingSpec fit_pca_lighting(std::span<const ImageBuffer> images, double alpha_std = 0.1) {
  RgbCovariance cov;
  for (const auto& img : images) cov.add(img);
  return fit_pca_lighting(cov, alpha_std);
}

}  // namespace convaug
