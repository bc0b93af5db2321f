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

#include "rirpinn/errors.hpp"

namespace rirpinn {

// Placement of a uniform linear array whose m-th microphone (0-based) sits
// at (x_a, y_0 + m d, z_a).
struct ArrayGeometry {
  double x_a = 0.0;
  double z_a = 0.0;
  double y_0 = 0.0;
};

// Sampled impulse responses of an M-microphone array, one channel per
// column of an N x M matrix. `data * peak_scale` is the physical signal.
struct RirGrid {
  Eigen::MatrixXd data;
  double fs = 8000.0;
  double d = 0.0202;
  ArrayGeometry geometry;
  double peak_scale = 1.0;

  Eigen::Index samples() const { return data.rows(); }
  Eigen::Index channels() const { return data.cols(); }

  // Throws DataError when the invariants (finite entries, N, M >= 1,
  // fs > 0, d > 0) do not hold.
  void validate() const;
};

// Grid metadata without samples, enough to rebuild the coordinate lattice.
struct GridMeta {
  Eigen::Index samples = 0;
  Eigen::Index channels = 0;
  double fs = 8000.0;
  double d = 0.0202;
  ArrayGeometry geometry;

  static GridMeta of(const RirGrid& grid) {
    return {grid.samples(), grid.channels(), grid.fs, grid.d, grid.geometry};
  }
};

// Subset of available channels: strictly increasing 0-based indices.
struct ObservationMask {
  std::vector<Eigen::Index> indices;
  Eigen::Index total_channels = 0;

  void validate() const;
  bool contains(Eigen::Index channel) const;
};

ObservationMask full_mask(Eigen::Index channels);

// Uniform sample without replacement, sorted. Deterministic in seed.
ObservationMask random_mask(Eigen::Index total, Eigen::Index observed, std::uint64_t seed);

// Physical (t, y) coordinates in a 2 x P matrix together with the signal
// values at those points. Points are ordered channel by channel, each
// channel contributing consecutive time samples.
struct SampleSet {
  Eigen::Matrix2Xd coords;
  Eigen::VectorXd values;
  Eigen::Index channels = 0;

  Eigen::Index size() const { return coords.cols(); }
  Eigen::Index samples_per_channel() const { return channels == 0 ? 0 : size() / channels; }
};

// Lattice of t = n / fs (n < N) and y = m d (m < M), channel-major so it
// lines up with the column-major storage of RirGrid::data.
Eigen::Matrix2Xd lattice_coordinates(const GridMeta& meta);

struct MaskedSamples {
  SampleSet observed;  // |mask| * N samples with their values
  SampleSet lattice;   // all M * N points; values hold the full grid
};

MaskedSamples apply_mask(const RirGrid& grid, const ObservationMask& mask);

// Scales data to unit peak magnitude and folds the factor into peak_scale.
RirGrid normalize_peak(const RirGrid& grid);
// Applies peak_scale to the data and resets it to 1.
RirGrid denormalize(const RirGrid& grid);

class GridIoError : public DataError {
 public:
  enum class Kind { kIo, kBadMagic, kBadVersion, kTruncated, kNonFinite, kParse };

  GridIoError(Kind kind, const std::string& message) : DataError(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Binary "RIRG" format: magic, u32 version, u32 N, u32 M, f64 fs, d, x_a,
// z_a, y_0, peak_scale, then N*M little-endian f64 in column-major order.
void write_grid(const std::filesystem::path& path, const RirGrid& grid);
RirGrid read_grid(const std::filesystem::path& path);

// CSV: `# key=value` metadata comments (fs, d, x_a, z_a, y_0, peak_scale),
// then one row per time sample with one column per channel.
void write_grid_csv(const std::filesystem::path& path, const RirGrid& grid);
RirGrid read_grid_csv(const std::filesystem::path& path);

// Plain text, one 0-based channel index per line, `#` comments allowed.
void write_mask(const std::filesystem::path& path, const ObservationMask& mask);
ObservationMask read_mask(const std::filesystem::path& path, Eigen::Index total_channels);

}  // namespace rirpinn
