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

#include "rirpinn/physics.hpp"

#include <cmath>
#include <iostream>

#include "rirpinn/errors.hpp"

namespace rirpinn {

using diffcore::Tape;
using diffcore::Var;

void PhysicsConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw UsageError("physics: speed of sound must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw UsageError("physics: lambda must be >= 0");
}

double aliasing_limit(double c, double d) {
  if (!(d > 0.0)) throw UsageError("aliasing_limit: spacing must be > 0");
  return c / (2.0 * d);
}

namespace {

void warn_outside(const CoordinateFrame& frame, const Eigen::Matrix2Xd& coords) {
  constexpr double kSlack = 1e-9;
  const Eigen::Matrix2Xd n = frame.normalize(coords);
  if (n.size() > 0 && n.cwiseAbs().maxCoeff() > 1.0 + kSlack)
    std::clog << "warning: wave residual evaluated outside the trained coordinate range\n";
}

Var record_residual(Tape& tape, const NetworkConfig& network, const CoordinateFrame& frame, Var flat,
                    const Eigen::Matrix2Xd& coords, double c) {
  const Var stack = tape.constant(wave_jet_stack(frame, coords), 2);
  const Var out = record_network(tape, network, flat, stack);
  const double tg = frame.time_gain(), sg = frame.space_gain();
  return tape.sub(tape.scale(tape.channel(out, 2), tg * tg / (c * c)), tape.scale(tape.channel(out, 4), sg * sg));
}

}  // namespace

Eigen::VectorXd wave_residual(const SirenParams& params, const CoordinateFrame& frame,
                              const Eigen::Matrix2Xd& coords, double c) {
  if (!(c > 0.0)) throw UsageError("wave_residual: speed of sound must be > 0");
  warn_outside(frame, coords);
  Tape tape;
  const Var flat = tape.constant(params.flat());
  return tape.value(record_residual(tape, params.config(), frame, flat, coords, c)).row(0).transpose();
}

RecordedLoss record_pinn_loss(Tape& tape, const NetworkConfig& network, const CoordinateFrame& frame, Var flat,
                              const SampleSet& observed, const SampleSet& collocation,
                              const PhysicsConfig& physics, bool skip_pde) {
  physics.validate();
  if (observed.size() == 0 || observed.channels == 0) throw DataError("pinn_loss: empty observation set");
  if (observed.values.size() != observed.size()) throw DataError("pinn_loss: observation values missing");

  RecordedLoss loss;
  const Var inputs = tape.constant(Eigen::MatrixXd(frame.normalize(observed.coords)));
  const Var prediction = record_network(tape, network, flat, inputs);
  const Var error = tape.sub(prediction, tape.constant(observed.values.transpose()));
  double data_norm = static_cast<double>(observed.channels);
  if (physics.mean_over_time) data_norm *= static_cast<double>(observed.samples_per_channel());
  loss.data = tape.scale(tape.sum(tape.square(error)), 1.0 / data_norm);

  if (skip_pde) {
    loss.total = loss.data;
    return loss;
  }
  if (collocation.size() == 0 || collocation.channels == 0) throw DataError("pinn_loss: empty collocation set");
  const Var residual = record_residual(tape, network, frame, flat, collocation.coords, physics.c);
  double pde_norm = static_cast<double>(collocation.channels);
  if (physics.mean_over_time) pde_norm *= static_cast<double>(collocation.samples_per_channel());
  loss.pde = tape.scale(tape.sum(tape.square(residual)), 1.0 / pde_norm);
  loss.total = tape.add(loss.data, tape.scale(loss.pde, physics.lambda));
  return loss;
}

LossBreakdown pinn_loss(const SirenParams& params, const CoordinateFrame& frame, const SampleSet& observed,
                        const SampleSet& collocation, const PhysicsConfig& physics) {
  Tape tape;
  const Var flat = tape.constant(params.flat());
  const RecordedLoss loss =
      record_pinn_loss(tape, params.config(), frame, flat, observed, collocation, physics);
  return {tape.scalar(loss.data), tape.scalar(loss.pde), tape.scalar(loss.total)};
}

}  // namespace rirpinn
