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
#include <string>
#include <vector>

#include "rirpinn/diffcore/tape.hpp"
#include "rirpinn/grids.hpp"

namespace rirpinn {

enum class Activation { kSine, kTanh };

std::string to_string(Activation activation);
Activation parse_activation(const std::string& text);

// Multilayer perceptron h(t, y): `hidden_layers` activated layers of
// `width` units followed by a linear output layer. Activated layer i
// computes act(omega_i * W_i x + b_i), with omega_i = omega0_first for the
// input layer and omega0_hidden after it. The defaults are the 198401
// parameter sine network.
struct NetworkConfig {
  int input_dim = 2;
  int output_dim = 1;
  int hidden_layers = 4;
  int width = 256;
  double omega0_first = 15.0;
  double omega0_hidden = 30.0;
  Activation activation = Activation::kSine;
  bool final_layer_linear = true;

  void validate() const;
};

struct LayerShape {
  Eigen::Index fan_in = 0;
  Eigen::Index fan_out = 0;
  Eigen::Index weight_offset = 0;  // fan_out x fan_in block, column-major
  Eigen::Index bias_offset = 0;
  double gain = 1.0;  // omega0 for activated layers, 1 for the output layer
  bool activated = true;
};

std::vector<LayerShape> layer_shapes(const NetworkConfig& config);

// Sum over layers of fan_in * fan_out + fan_out.
Eigen::Index param_count(const NetworkConfig& config);

// All weights and biases in one flat vector (the optimizer's view), with
// per-layer matrix views on top.
class SirenParams {
 public:
  SirenParams(NetworkConfig config, Eigen::VectorXd flat);

  const NetworkConfig& config() const { return config_; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  const Eigen::VectorXd& flat() const { return flat_; }
  Eigen::VectorXd& flat() { return flat_; }

  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<Eigen::MatrixXd> weight(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);

 private:
  NetworkConfig config_;
  std::vector<LayerShape> layers_;
  Eigen::VectorXd flat_;
};

// Input layer weights and biases ~ U(-1/fan_in, 1/fan_in); all later
// layers ~ U(-sqrt(6/fan_in)/omega0_hidden, +sqrt(6/fan_in)/omega0_hidden).
// Deterministic in seed.
SirenParams init(const NetworkConfig& config, std::uint64_t seed);

// Affine map of physical (t, y) onto [-1, 1]^2: t in [0, duration] and
// y in [0, span].
struct CoordinateFrame {
  double duration = 1.0;
  double span = 1.0;

  // Frame covering the lattice of a grid: duration (N-1)/fs and span
  // (M-1) d. Degenerate axes (N or M equal to 1) fall back to one sample
  // period or one spacing.
  static CoordinateFrame for_grid(const GridMeta& meta);

  Eigen::Matrix2Xd normalize(const Eigen::Matrix2Xd& physical) const;
  // d(normalized)/d(physical) per axis.
  double time_gain() const { return 2.0 / duration; }
  double space_gain() const { return 2.0 / span; }
};

// Records the network applied to `input` (a plain matrix or jet stack of
// normalized coordinates, input_dim rows) with parameters `flat` on the
// tape. Returns the output node (output_dim rows, same jet layout).
diffcore::Var record_network(diffcore::Tape& tape, const NetworkConfig& config, diffcore::Var flat,
                             diffcore::Var input);

// Network output for inputs already in normalized coordinates
// (input_dim x B).
Eigen::VectorXd forward(const SirenParams& params, const Eigen::MatrixXd& inputs);
// Network output at physical (t, y) coordinates.
Eigen::VectorXd forward(const SirenParams& params, const CoordinateFrame& frame,
                        const Eigen::Matrix2Xd& physical);

struct WaveDerivatives {
  Eigen::VectorXd value;
  Eigen::VectorXd d2t;  // d^2 h / dt^2 in 1/s^2
  Eigen::VectorXd d2y;  // d^2 h / dy^2 in 1/m^2
};

// Value and second derivatives along both physical axes.
WaveDerivatives forward_with_derivs(const SirenParams& params, const CoordinateFrame& frame,
                                    const Eigen::Matrix2Xd& physical);

// Jet stack for physical coordinates: normalized points with the two unit
// axis directions (time first, then array axis).
Eigen::MatrixXd wave_jet_stack(const CoordinateFrame& frame, const Eigen::Matrix2Xd& physical);

// "SIRN" checkpoint: magic, u32 version, u32 input_dim, u32 output_dim,
// u32 hidden_layers, u32 width, f64 omega0_first, f64 omega0_hidden,
// u32 activation (0 sine, 1 tanh), u32 final_layer_linear, u64 count,
// then count little-endian f64 parameters.
void write_checkpoint(const std::filesystem::path& path, const SirenParams& params);
SirenParams read_checkpoint(const std::filesystem::path& path);

}  // namespace rirpinn
