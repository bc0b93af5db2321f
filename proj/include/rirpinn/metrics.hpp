// Copyright 2026 The rirpinn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "rirpinn/errors.hpp"
#include "rirpinn/grids.hpp"

namespace rirpinn {

// Per-channel ratios ||est_m - ref_m||^2 / ||ref_m||^2 for N x M matrices.
template <typename DerivedA, typename DerivedB>
Eigen::ArrayXd nmse_ratios(const Eigen::MatrixBase<DerivedA>& estimate, const Eigen::MatrixBase<DerivedB>& reference) {
  if (estimate.rows() != reference.rows() || estimate.cols() != reference.cols())
    throw DataError("nmse: estimate and reference shapes differ");
  Eigen::ArrayXd ratios(reference.cols());
  for (Eigen::Index m = 0; m < reference.cols(); ++m) {
    const double energy = reference.col(m).squaredNorm();
    if (!(energy > 0.0)) throw DataError("nmse: reference channel " + std::to_string(m) + " is all zero");
    ratios[m] = (estimate.col(m) - reference.col(m)).squaredNorm() / energy;
  }
  return ratios;
}

// 10 log10(ratio); an exact reconstruction (ratio 0) maps to -infinity
// rather than an underflowed finite number.
inline double to_db(double ratio) {
  if (ratio == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ratio);
}

// "-inf" for the perfect-reconstruction sentinel, "n/a" for NaN.
std::string format_db(double db);

struct NmseReport {
  double overall_db = 0.0;
  Eigen::VectorXd per_channel_db;
  // Over masked / unmasked channels; NaN when no mask was given or the
  // subset is empty.
  double observed_db = std::numeric_limits<double>::quiet_NaN();
  double missing_db = std::numeric_limits<double>::quiet_NaN();
};

// Overall value is 10 log10 of the mean of the linear per-channel ratios.
NmseReport nmse(const RirGrid& estimate, const RirGrid& reference, const ObservationMask* mask = nullptr);

// Columns: channel, observed (0/1 or blank), nmse_db.
void write_nmse_csv(const std::filesystem::path& path, const NmseReport& report, const ObservationMask* mask);
// key = value lines: overall_db, observed_db, missing_db, channels.
void write_nmse_summary(const std::filesystem::path& path, const NmseReport& report);

}  // namespace rirpinn
