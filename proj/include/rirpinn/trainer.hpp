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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rirpinn/errors.hpp"
#include "rirpinn/grids.hpp"
#include "rirpinn/network.hpp"
#include "rirpinn/physics.hpp"

namespace rirpinn {

struct AdamState {
  std::int64_t step = 0;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState zeros(Eigen::Index size, double lr);
};

// One bias-corrected Adam update of params in place. Throws NumericalError
// naming the first non-finite gradient entry.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads);

// The three training regimes compared in the experiments.
enum class Variant { kPiSiren, kSiren, kPinnTanh };

std::string to_string(Variant variant);
Variant parse_variant(const std::string& text);

struct TrainConfig {
  int iterations = 2000;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  NetworkConfig network;
  PhysicsConfig physics;
  int log_every = 100;
  std::optional<std::filesystem::path> checkpoint_path;
  // With lambda == 0 the wave term carries no gradient. When set, it is
  // still evaluated (forward only) for the history; otherwise the history
  // records NaN for it.
  bool track_pde = true;

  void validate() const;
  // Applies the activation and lambda of a variant: pi-siren = (sine,
  // lambda), siren = (sine, 0), pinn-tanh = (tanh, lambda).
  TrainConfig with_variant(Variant variant) const;
};

struct TrainReport {
  std::vector<LossBreakdown> history;  // one entry per iteration
  SirenParams params;
  double wall_seconds = 0.0;
  TrainConfig config;
  std::uint64_t seed = 0;
  double peak_scale = 1.0;  // the network fits data / peak_scale
  GridMeta meta;
};

class TrainingAborted : public NumericalError {
 public:
  TrainingAborted(const std::string& message, int iteration, SirenParams last_finite)
      : NumericalError(message), iteration_(iteration), last_finite_(std::move(last_finite)) {}
  int iteration() const { return iteration_; }
  const SirenParams& last_finite() const { return last_finite_; }

 private:
  int iteration_;
  SirenParams last_finite_;
};

using ProgressCallback = std::function<void(int iteration, const LossBreakdown& loss)>;

// Full-batch Adam on the physics-informed loss: the masked channels form
// the data term and the whole N x M lattice is the collocation set. The
// grid is peak-normalized first. Deterministic in (cfg, grid, mask).
TrainReport train(const TrainConfig& cfg, const RirGrid& grid, const ObservationMask& mask,
                  const ProgressCallback& progress = {});

// Evaluates the network on the full lattice of `meta` and scales the
// result back by peak_scale.
RirGrid reconstruct(const SirenParams& params, const GridMeta& meta, double peak_scale = 1.0);

// Columns: iteration, data_term, pde_term, total.
void write_history_csv(const std::filesystem::path& path, const TrainReport& report);

}  // namespace rirpinn
