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

#include "rirpinn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

namespace rirpinn {

using diffcore::Tape;
using diffcore::Var;

AdamState AdamState::zeros(Eigen::Index size, double lr) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(size);
  s.v = Eigen::VectorXd::Zero(size);
  s.lr = lr;
  return s;
}

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
    throw DataError("adam_step: size mismatch");
  for (Eigen::Index i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads[i]))
      throw NumericalError("adam_step: non-finite gradient at parameter " + std::to_string(i));
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
  params.array() -= state.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.epsilon);
}

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::kPiSiren: return "pi-siren";
    case Variant::kSiren: return "siren";
    case Variant::kPinnTanh: return "pinn-tanh";
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  if (text == "pi-siren") return Variant::kPiSiren;
  if (text == "siren") return Variant::kSiren;
  if (text == "pinn-tanh") return Variant::kPinnTanh;
  throw UsageError("unknown variant '" + text + "' (expected pi-siren, siren or pinn-tanh)");
}

void TrainConfig::validate() const {
  if (iterations < 0) throw UsageError("train: iterations must be >= 0");
  if (!(lr > 0.0)) throw UsageError("train: learning rate must be > 0");
  if (log_every < 0) throw UsageError("train: log_every must be >= 0");
  network.validate();
  physics.validate();
  if (network.input_dim != 2 || network.output_dim != 1)
    throw UsageError("train: the network must map (t, y) to one output");
}

TrainConfig TrainConfig::with_variant(Variant variant) const {
  TrainConfig out = *this;
  switch (variant) {
    case Variant::kPiSiren:
      out.network.activation = Activation::kSine;
      break;
    case Variant::kSiren:
      out.network.activation = Activation::kSine;
      out.physics.lambda = 0.0;
      break;
    case Variant::kPinnTanh:
      out.network.activation = Activation::kTanh;
      break;
  }
  return out;
}

namespace {

LossBreakdown evaluate_pde_only(const SirenParams& params, const CoordinateFrame& frame, const SampleSet& lattice,
                                const PhysicsConfig& physics) {
  const Eigen::VectorXd r = wave_residual(params, frame, lattice.coords, physics.c);
  double norm = static_cast<double>(lattice.channels);
  if (physics.mean_over_time) norm *= static_cast<double>(lattice.samples_per_channel());
  LossBreakdown b;
  b.pde_term_unweighted = r.squaredNorm() / norm;
  return b;
}

}  // namespace

TrainReport train(const TrainConfig& cfg, const RirGrid& grid, const ObservationMask& mask,
                  const ProgressCallback& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const RirGrid normalized = normalize_peak(grid);
  const MaskedSamples samples = apply_mask(normalized, mask);
  const GridMeta meta = GridMeta::of(grid);
  const CoordinateFrame frame = CoordinateFrame::for_grid(meta);

  TrainReport report{{}, init(cfg.network, cfg.seed), 0.0, cfg, cfg.seed, normalized.peak_scale, meta};
  report.history.reserve(static_cast<std::size_t>(cfg.iterations));
  SirenParams& params = report.params;
  AdamState adam = AdamState::zeros(params.flat().size(), cfg.lr);
  const bool skip_pde = cfg.physics.lambda == 0.0;

  for (int it = 0; it < cfg.iterations; ++it) {
    LossBreakdown loss;
    Eigen::VectorXd grads;
    try {
      Tape tape;
      const Var flat = tape.variable(params.flat());
      const RecordedLoss rec = record_pinn_loss(tape, cfg.network, frame, flat, samples.observed, samples.lattice,
                                                cfg.physics, skip_pde);
      tape.backward(rec.total);
      loss.data_term = tape.scalar(rec.data);
      loss.total = tape.scalar(rec.total);
      if (rec.pde.valid()) {
        loss.pde_term_unweighted = tape.scalar(rec.pde);
      } else if (cfg.track_pde) {
        loss.pde_term_unweighted = evaluate_pde_only(params, frame, samples.lattice, cfg.physics).pde_term_unweighted;
      } else {
        loss.pde_term_unweighted = std::numeric_limits<double>::quiet_NaN();
      }
      grads = tape.gradient(flat).col(0);
      if (!std::isfinite(loss.total)) throw NumericalError("loss is not finite");
      adam_step(adam, params.flat(), grads);
    } catch (const NumericalError& e) {
      throw TrainingAborted("training aborted at iteration " + std::to_string(it) + ": " + e.what(), it, params);
    }
    report.history.push_back(loss);
    if (progress && cfg.log_every > 0 && (it % cfg.log_every == 0 || it + 1 == cfg.iterations)) progress(it, loss);
  }
  if (cfg.checkpoint_path) write_checkpoint(*cfg.checkpoint_path, params);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

RirGrid reconstruct(const SirenParams& params, const GridMeta& meta, double peak_scale) {
  const Eigen::Matrix2Xd coords = lattice_coordinates(meta);
  const Eigen::VectorXd h = forward(params, CoordinateFrame::for_grid(meta), coords);
  RirGrid out;
  out.data = Eigen::Map<const Eigen::MatrixXd>(h.data(), meta.samples, meta.channels);
  out.fs = meta.fs;
  out.d = meta.d;
  out.geometry = meta.geometry;
  out.peak_scale = peak_scale;
  return denormalize(out);
}

void write_history_csv(const std::filesystem::path& path, const TrainReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "iteration,data_term,pde_term,total\n";
  for (std::size_t i = 0; i < report.history.size(); ++i) {
    const LossBreakdown& b = report.history[i];
    out << i << ',' << b.data_term << ',' << b.pde_term_unweighted << ',' << b.total << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace rirpinn
