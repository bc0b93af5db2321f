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

#include <array>
#include <filesystem>
#include <optional>

#include "rirpinn/grids.hpp"

namespace rirpinn {

// Shoebox room with one omnidirectional point source. Wall reflection
// coefficients come from `t60` (Sabine, uniform walls) when it is set,
// otherwise from `beta` in the order x=0, x=Lx, y=0, y=Ly, z=0, z=Lz.
struct RoomSpec {
  Eigen::Vector3d dims{6.0, 4.0, 3.0};
  std::optional<double> t60 = 0.5;
  std::array<double, 6> beta{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d source{1.5, 1.0, 1.2};
  double c = 343.0;
  double fs = 8000.0;

  void validate() const;
  // Per-wall coefficients after resolving t60.
  std::array<double, 6> wall_betas() const;
};

// Uniform linear array along y: microphone m (0-based) at
// (x_a, y_0 + m d, z_a).
struct UlaSpec {
  Eigen::Index m = 100;
  double d = 0.0202;
  double x_a = 4.0;
  double z_a = 1.5;
  double y_0 = 0.9;

  Eigen::Vector3d position(Eigen::Index mic) const { return {x_a, y_0 + static_cast<double>(mic) * d, z_a}; }
};

// Uniform reflection coefficient from Sabine's formula:
// alpha = 0.161 V / (S t60), beta = sqrt(1 - alpha). alpha = 1 gives a
// fully absorbing room (beta = 0); alpha > 1 is rejected.
double t60_to_beta(const Eigen::Vector3d& dims, double t60, double c = 343.0);

// Half-width of the fractional-delay interpolator, in samples. The Hann
// window spans 81 taps around each arrival.
inline constexpr double kDelayHalfWidth = 40.5;
// Low-pass cutoff of the interpolator relative to Nyquist.
inline constexpr double kDelayCutoff = 0.9;

// Interpolation kernel value at offset x samples from an arrival:
// Hann(x) * sinc(kDelayCutoff * x), unit at x = 0.
double delay_kernel(double x);

// Image-source impulse response at `mic`: every image with at most
// max_order reflections contributes beta^reflections / (4 pi r) at delay
// r / c through delay_kernel. Truncated to n_samples.
Eigen::VectorXd simulate_rir(const RoomSpec& room, const Eigen::Vector3d& mic, Eigen::Index n_samples,
                             int max_order = 20);

RirGrid simulate_grid(const RoomSpec& room, const UlaSpec& ula, Eigen::Index n_samples, int max_order = 20);

// Key-value manifest of every room and array field.
void write_manifest(const std::filesystem::path& path, const RoomSpec& room, const UlaSpec& ula,
                    Eigen::Index n_samples, int max_order);

}  // namespace rirpinn
