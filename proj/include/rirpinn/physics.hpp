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

#include "rirpinn/diffcore/tape.hpp"
#include "rirpinn/grids.hpp"
#include "rirpinn/network.hpp"

namespace rirpinn {

struct PhysicsConfig {
  double c = 343.0;       // speed of sound, m/s
  double lambda = 5e-15;  // weight of the wave-equation term
  // Divide both loss terms by the samples per channel as well.
  bool mean_over_time = false;

  void validate() const;
};

struct LossBreakdown {
  double data_term = 0.0;
  double pde_term_unweighted = 0.0;
  double total = 0.0;
};

// Highest frequency a uniform linear array with spacing d samples without
// spatial aliasing: c / (2 d).
double aliasing_limit(double c, double d);

// Homogeneous wave-equation residual (1/c^2) h_tt - h_yy at physical (t, y)
// points. Only the array axis contributes to the Laplacian, since the
// representation has no x or z input. Points outside the frame produce a
// warning on std::clog.
Eigen::VectorXd wave_residual(const SirenParams& params, const CoordinateFrame& frame,
                              const Eigen::Matrix2Xd& coords, double c);

// Nodes of the loss recorded on a tape. `pde` is invalid when the caller
// asked to skip the wave term.
struct RecordedLoss {
  diffcore::Var data;
  diffcore::Var pde;
  diffcore::Var total;
};

// Records
//   data = (1/|observed channels|) sum over observed samples of (h_hat - h)^2
//   pde  = (1/|collocation channels|) sum over collocation points of r^2
//   total = data + lambda * pde
// with both terms additionally divided by the samples per channel when
// mean_over_time is set. With skip_pde the wave term is not recorded and
// total = data.
RecordedLoss record_pinn_loss(diffcore::Tape& tape, const NetworkConfig& network, const CoordinateFrame& frame,
                              diffcore::Var flat, const SampleSet& observed, const SampleSet& collocation,
                              const PhysicsConfig& physics, bool skip_pde = false);

LossBreakdown pinn_loss(const SirenParams& params, const CoordinateFrame& frame, const SampleSet& observed,
                        const SampleSet& collocation, const PhysicsConfig& physics);

}  // namespace rirpinn
