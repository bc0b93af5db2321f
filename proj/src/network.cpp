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

#include "rirpinn/network.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "binary_io.hpp"
#include "rirpinn/errors.hpp"

namespace rirpinn {

using diffcore::Tape;
using diffcore::Var;
using Eigen::Index;

std::string to_string(Activation activation) {
  return activation == Activation::kSine ? "sine" : "tanh";
}

Activation parse_activation(const std::string& text) {
  if (text == "sine" || text == "sin") return Activation::kSine;
  if (text == "tanh") return Activation::kTanh;
  throw UsageError("unknown activation '" + text + "' (expected sine or tanh)");
}

void NetworkConfig::validate() const {
  if (input_dim < 1 || output_dim < 1) throw UsageError("network: input and output dimensions must be >= 1");
  if (hidden_layers < 1) throw UsageError("network: hidden_layers must be >= 1");
  if (width < 1) throw UsageError("network: width must be >= 1");
  if (!(omega0_first > 0.0) || !(omega0_hidden > 0.0)) throw UsageError("network: omega0 values must be > 0");
  if (!final_layer_linear) throw UsageError("network: the output layer is always linear");
}

std::vector<LayerShape> layer_shapes(const NetworkConfig& config) {
  config.validate();
  std::vector<LayerShape> layers;
  Index offset = 0;
  Index fan_in = config.input_dim;
  for (int i = 0; i <= config.hidden_layers; ++i) {
    LayerShape s;
    s.activated = i < config.hidden_layers;
    s.fan_in = fan_in;
    s.fan_out = s.activated ? config.width : config.output_dim;
    s.gain = !s.activated ? 1.0 : (i == 0 ? config.omega0_first : config.omega0_hidden);
    s.weight_offset = offset;
    s.bias_offset = offset + s.fan_in * s.fan_out;
    offset = s.bias_offset + s.fan_out;
    fan_in = s.fan_out;
    layers.push_back(s);
  }
  return layers;
}

Index param_count(const NetworkConfig& config) {
  const auto layers = layer_shapes(config);
  return layers.back().bias_offset + layers.back().fan_out;
}

SirenParams::SirenParams(NetworkConfig config, Eigen::VectorXd flat)
    : config_(config), layers_(layer_shapes(config)), flat_(std::move(flat)) {
  if (flat_.size() != param_count(config_))
    throw DataError("network: expected " + std::to_string(param_count(config_)) + " parameters, got " +
                    std::to_string(flat_.size()));
}

Eigen::Map<const Eigen::MatrixXd> SirenParams::weight(std::size_t layer) const {
  const LayerShape& s = layers_.at(layer);
  return {flat_.data() + s.weight_offset, s.fan_out, s.fan_in};
}

Eigen::Map<Eigen::MatrixXd> SirenParams::weight(std::size_t layer) {
  const LayerShape& s = layers_.at(layer);
  return {flat_.data() + s.weight_offset, s.fan_out, s.fan_in};
}

Eigen::Map<const Eigen::VectorXd> SirenParams::bias(std::size_t layer) const {
  const LayerShape& s = layers_.at(layer);
  return {flat_.data() + s.bias_offset, s.fan_out};
}

Eigen::Map<Eigen::VectorXd> SirenParams::bias(std::size_t layer) {
  const LayerShape& s = layers_.at(layer);
  return {flat_.data() + s.bias_offset, s.fan_out};
}

SirenParams init(const NetworkConfig& config, std::uint64_t seed) {
  SirenParams params(config, Eigen::VectorXd::Zero(param_count(config)));
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < params.layers().size(); ++l) {
    const LayerShape& s = params.layers()[l];
    const double range = l == 0 ? 1.0 / static_cast<double>(s.fan_in)
                                : std::sqrt(6.0 / static_cast<double>(s.fan_in)) / config.omega0_hidden;
    std::uniform_real_distribution<double> dist(-range, range);
    auto w = params.weight(l);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    auto b = params.bias(l);
    for (Index i = 0; i < b.size(); ++i) b[i] = dist(rng);
  }
  return params;
}

CoordinateFrame CoordinateFrame::for_grid(const GridMeta& meta) {
  CoordinateFrame f;
  f.duration = static_cast<double>(std::max<Index>(meta.samples - 1, 1)) / meta.fs;
  f.span = static_cast<double>(std::max<Index>(meta.channels - 1, 1)) * meta.d;
  return f;
}

Eigen::Matrix2Xd CoordinateFrame::normalize(const Eigen::Matrix2Xd& physical) const {
  Eigen::Matrix2Xd out(2, physical.cols());
  out.row(0) = (physical.row(0).array() * time_gain() - 1.0).matrix();
  out.row(1) = (physical.row(1).array() * space_gain() - 1.0).matrix();
  return out;
}

Var record_network(Tape& tape, const NetworkConfig& config, Var flat, Var input) {
  const auto layers = layer_shapes(config);
  if (tape.value(input).rows() != config.input_dim)
    throw DataError("network: input has " + std::to_string(tape.value(input).rows()) + " rows, expected " +
                    std::to_string(config.input_dim));
  Var x = input;
  for (const LayerShape& s : layers) {
    const Var w = tape.slice(flat, s.weight_offset, s.fan_out, s.fan_in);
    const Var b = tape.slice(flat, s.bias_offset, s.fan_out, 1);
    const Var z = tape.affine(w, x, b, s.gain);
    if (!s.activated) {
      x = z;
    } else {
      x = config.activation == Activation::kSine ? tape.sin(z) : tape.tanh(z);
    }
  }
  return x;
}

Eigen::VectorXd forward(const SirenParams& params, const Eigen::MatrixXd& inputs) {
  Tape tape;
  const Var flat = tape.constant(params.flat());
  const Var out = record_network(tape, params.config(), flat, tape.constant(inputs));
  return tape.value(out).row(0).transpose();
}

Eigen::VectorXd forward(const SirenParams& params, const CoordinateFrame& frame,
                        const Eigen::Matrix2Xd& physical) {
  if (params.config().input_dim != 2) throw DataError("network: physical coordinates need input_dim 2");
  return forward(params, Eigen::MatrixXd(frame.normalize(physical)));
}

Eigen::MatrixXd wave_jet_stack(const CoordinateFrame& frame, const Eigen::Matrix2Xd& physical) {
  return diffcore::make_jet_stack(frame.normalize(physical), Eigen::Matrix2d::Identity());
}

WaveDerivatives forward_with_derivs(const SirenParams& params, const CoordinateFrame& frame,
                                    const Eigen::Matrix2Xd& physical) {
  if (params.config().input_dim != 2) throw DataError("network: physical coordinates need input_dim 2");
  Tape tape;
  const Var flat = tape.constant(params.flat());
  const Var out =
      record_network(tape, params.config(), flat, tape.constant(wave_jet_stack(frame, physical), 2));
  const Eigen::MatrixXd& v = tape.value(out);
  const Index B = physical.cols();
  WaveDerivatives d;
  d.value = v.block(0, 0, 1, B).transpose();
  d.d2t = v.block(0, 2 * B, 1, B).transpose() * (frame.time_gain() * frame.time_gain());
  d.d2y = v.block(0, 4 * B, 1, B).transpose() * (frame.space_gain() * frame.space_gain());
  return d;
}

namespace {

constexpr char kCheckpointMagic[4] = {'S', 'I', 'R', 'N'};
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const SirenParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  const NetworkConfig& c = params.config();
  out.write(kCheckpointMagic, 4);
  detail::write_le<std::uint32_t>(out, kCheckpointVersion);
  for (int v : {c.input_dim, c.output_dim, c.hidden_layers, c.width})
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(v));
  detail::write_le(out, c.omega0_first);
  detail::write_le(out, c.omega0_hidden);
  detail::write_le<std::uint32_t>(out, c.activation == Activation::kSine ? 0u : 1u);
  detail::write_le<std::uint32_t>(out, c.final_layer_linear ? 1u : 0u);
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(params.flat().size()));
  for (Index i = 0; i < params.flat().size(); ++i) detail::write_le(out, params.flat()[i]);
  if (!out) throw DataError("write failed for " + path.string());
}

SirenParams read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const auto truncated = [&] { return DataError(path.string() + ": checkpoint is truncated"); };
  char magic[4];
  if (!in.read(magic, 4)) throw truncated();
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw DataError(path.string() + ": not a SIRN checkpoint");
  std::uint32_t version = 0;
  if (!detail::read_le(in, version)) throw truncated();
  if (version != kCheckpointVersion)
    throw DataError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  std::uint32_t dims[4];
  for (auto& v : dims)
    if (!detail::read_le(in, v)) throw truncated();
  NetworkConfig c;
  c.input_dim = static_cast<int>(dims[0]);
  c.output_dim = static_cast<int>(dims[1]);
  c.hidden_layers = static_cast<int>(dims[2]);
  c.width = static_cast<int>(dims[3]);
  std::uint32_t activation = 0, linear = 0;
  std::uint64_t count = 0;
  if (!detail::read_le(in, c.omega0_first) || !detail::read_le(in, c.omega0_hidden) ||
      !detail::read_le(in, activation) || !detail::read_le(in, linear) || !detail::read_le(in, count))
    throw truncated();
  if (activation > 1) throw DataError(path.string() + ": unknown activation code");
  c.activation = activation == 0 ? Activation::kSine : Activation::kTanh;
  c.final_layer_linear = linear != 0;
  c.validate();
  if (count != static_cast<std::uint64_t>(param_count(c)))
    throw DataError(path.string() + ": parameter count does not match the stored configuration");
  Eigen::VectorXd flat(static_cast<Index>(count));
  for (Index i = 0; i < flat.size(); ++i)
    if (!detail::read_le(in, flat[i])) throw truncated();
  if (!flat.allFinite()) throw DataError(path.string() + ": non-finite parameter");
  return SirenParams(c, std::move(flat));
}

}  // namespace rirpinn
