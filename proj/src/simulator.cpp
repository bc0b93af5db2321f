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

#include "rirpinn/simulator.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>

#include "rirpinn/errors.hpp"

namespace rirpinn {

using Eigen::Index;
using Eigen::Vector3d;

namespace {

bool inside(const Vector3d& p, const Vector3d& dims) {
  return (p.array() > 0.0).all() && (p.array() < dims.array()).all();
}

}  // namespace

void RoomSpec::validate() const {
  if (!(dims.array() > 0.0).all()) throw UsageError("room: dimensions must be positive");
  if (!inside(source, dims)) throw UsageError("room: source must lie strictly inside the room");
  if (!(c > 0.0)) throw UsageError("room: speed of sound must be > 0");
  if (!(fs > 0.0)) throw UsageError("room: sampling rate must be > 0");
  if (t60) {
    if (!(*t60 > 0.0)) throw UsageError("room: t60 must be > 0");
  } else {
    for (double b : beta)
      if (!(std::abs(b) < 1.0)) throw UsageError("room: reflection coefficients must satisfy |beta| < 1");
  }
}

std::array<double, 6> RoomSpec::wall_betas() const {
  if (!t60) return beta;
  std::array<double, 6> out;
  out.fill(t60_to_beta(dims, *t60, c));
  return out;
}

double t60_to_beta(const Vector3d& dims, double t60, double /*c*/) {
  if (!(t60 > 0.0)) throw UsageError("t60_to_beta: t60 must be > 0");
  if (std::isinf(t60)) return 1.0;
  const double volume = dims.prod();
  const double surface = 2.0 * (dims.x() * dims.y() + dims.x() * dims.z() + dims.y() * dims.z());
  double alpha = 0.161 * volume / (surface * t60);
  if (std::abs(alpha - 1.0) <= 1e-12) alpha = 1.0;
  if (alpha > 1.0)
    throw UsageError("t60_to_beta: absorption " + std::to_string(alpha) +
                     " exceeds 1; the reverberation time is too short for this room");
  return std::sqrt(1.0 - alpha);
}

double delay_kernel(double x) {
  if (std::abs(x) >= kDelayHalfWidth) return 0.0;
  const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * x / kDelayHalfWidth));
  const double arg = std::numbers::pi * kDelayCutoff * x;
  const double sinc = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
  return window * sinc;
}

Eigen::VectorXd simulate_rir(const RoomSpec& room, const Vector3d& mic, Index n_samples, int max_order) {
  room.validate();
  if (n_samples < 1) throw UsageError("simulate_rir: n_samples must be >= 1");
  if (max_order < 0) throw UsageError("simulate_rir: max_order must be >= 0");
  if (!inside(mic, room.dims)) throw UsageError("simulate_rir: microphone must lie strictly inside the room");
  if ((mic - room.source).norm() == 0.0) throw UsageError("simulate_rir: microphone coincides with the source");

  const std::array<double, 6> beta = room.wall_betas();
  const double samples_per_meter = room.fs / room.c;
  // Images farther than this cannot reach the output window.
  const double max_distance = (static_cast<double>(n_samples) + kDelayHalfWidth) / samples_per_meter;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n_samples);
  int range[3];
  for (int a = 0; a < 3; ++a)
    range[a] = std::min(max_order, static_cast<int>(std::ceil(max_distance / (2.0 * room.dims[a]))) + 1);

  // Axis a image coordinate: (1 - 2q) s + 2 n L, with |n - q| reflections
  // off the wall at 0 and |n| off the wall at L.
  for (int nx = -range[0]; nx <= range[0]; ++nx)
    for (int qx = 0; qx <= 1; ++qx)
      for (int ny = -range[1]; ny <= range[1]; ++ny)
        for (int qy = 0; qy <= 1; ++qy)
          for (int nz = -range[2]; nz <= range[2]; ++nz)
            for (int qz = 0; qz <= 1; ++qz) {
              const int n[3] = {nx, ny, nz};
              const int q[3] = {qx, qy, qz};
              int order = 0;
              double gain = 1.0;
              Vector3d image;
              for (int a = 0; a < 3; ++a) {
                const int low = std::abs(n[a] - q[a]), high = std::abs(n[a]);
                order += low + high;
                gain *= std::pow(beta[2 * a], low) * std::pow(beta[2 * a + 1], high);
                image[a] = (1 - 2 * q[a]) * room.source[a] + 2.0 * n[a] * room.dims[a];
              }
              if (order > max_order || gain == 0.0) continue;
              const double r = (image - mic).norm();
              if (r > max_distance) continue;
              const double delay = r * samples_per_meter;
              const double amplitude = gain / (4.0 * std::numbers::pi * r);
              const Index first = std::max<Index>(0, static_cast<Index>(std::ceil(delay - kDelayHalfWidth)));
              const Index last =
                  std::min<Index>(n_samples - 1, static_cast<Index>(std::floor(delay + kDelayHalfWidth)));
              for (Index k = first; k <= last; ++k) h[k] += amplitude * delay_kernel(static_cast<double>(k) - delay);
            }
  return h;
}

RirGrid simulate_grid(const RoomSpec& room, const UlaSpec& ula, Index n_samples, int max_order) {
  if (ula.m < 1) throw UsageError("simulate_grid: the array needs at least one microphone");
  if (!(ula.d > 0.0)) throw UsageError("simulate_grid: spacing must be > 0");
  RirGrid grid;
  grid.fs = room.fs;
  grid.d = ula.d;
  grid.geometry = {ula.x_a, ula.z_a, ula.y_0};
  grid.data.resize(n_samples, ula.m);
  for (Index m = 0; m < ula.m; ++m) grid.data.col(m) = simulate_rir(room, ula.position(m), n_samples, max_order);
  return grid;
}

void write_manifest(const std::filesystem::path& path, const RoomSpec& room, const UlaSpec& ula, Index n_samples,
                    int max_order) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  const auto b = room.wall_betas();
  out << "room.dims = " << room.dims.x() << ' ' << room.dims.y() << ' ' << room.dims.z() << '\n';
  if (room.t60) out << "room.t60 = " << *room.t60 << '\n';
  out << "room.beta = " << b[0] << ' ' << b[1] << ' ' << b[2] << ' ' << b[3] << ' ' << b[4] << ' ' << b[5] << '\n'
      << "room.source = " << room.source.x() << ' ' << room.source.y() << ' ' << room.source.z() << '\n'
      << "room.c = " << room.c << '\n'
      << "room.fs = " << room.fs << '\n'
      << "room.samples = " << n_samples << '\n'
      << "room.max_order = " << max_order << '\n'
      << "array.m = " << ula.m << '\n'
      << "array.d = " << ula.d << '\n'
      << "array.x_a = " << ula.x_a << '\n'
      << "array.z_a = " << ula.z_a << '\n'
      << "array.y_0 = " << ula.y_0 << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace rirpinn
