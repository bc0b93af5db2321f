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

#include "rirpinn/grids.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "binary_io.hpp"

namespace rirpinn {

using Eigen::Index;

namespace {

constexpr char kGridMagic[4] = {'R', 'I', 'R', 'G'};
constexpr std::uint32_t kGridVersion = 1;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw GridIoError(GridIoError::Kind::kParse, "cannot parse '" + t + "' as a number in " + what);
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void RirGrid::validate() const {
  if (data.rows() < 1 || data.cols() < 1) throw DataError("grid: N and M must be at least 1");
  if (!(fs > 0.0) || !std::isfinite(fs)) throw DataError("grid: sampling rate must be positive");
  if (!(d > 0.0) || !std::isfinite(d)) throw DataError("grid: microphone spacing must be positive");
  if (!data.allFinite()) throw DataError("grid: non-finite sample");
}

void ObservationMask::validate() const {
  if (indices.empty()) throw DataError("mask: no observed channels");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= total_channels)
      throw DataError("mask: channel " + std::to_string(indices[i]) + " outside [0, " +
                      std::to_string(total_channels) + ")");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw DataError("mask: indices must be strictly increasing");
  }
}

bool ObservationMask::contains(Index channel) const {
  return std::binary_search(indices.begin(), indices.end(), channel);
}

ObservationMask full_mask(Index channels) {
  ObservationMask mask;
  mask.total_channels = channels;
  mask.indices.resize(static_cast<std::size_t>(channels));
  std::iota(mask.indices.begin(), mask.indices.end(), Index{0});
  return mask;
}

ObservationMask random_mask(Index total, Index observed, std::uint64_t seed) {
  if (observed < 1 || observed > total)
    throw UsageError("random_mask: need 1 <= observed <= total, got " + std::to_string(observed) +
                     " of " + std::to_string(total));
  const ObservationMask all = full_mask(total);
  ObservationMask mask;
  mask.total_channels = total;
  std::mt19937_64 rng(seed);
  std::sample(all.indices.begin(), all.indices.end(), std::back_inserter(mask.indices),
              observed, rng);
  return mask;
}

Eigen::Matrix2Xd lattice_coordinates(const GridMeta& meta) {
  Eigen::Matrix2Xd coords(2, meta.samples * meta.channels);
  for (Index m = 0; m < meta.channels; ++m)
    for (Index n = 0; n < meta.samples; ++n) {
      coords(0, m * meta.samples + n) = static_cast<double>(n) / meta.fs;
      coords(1, m * meta.samples + n) = static_cast<double>(m) * meta.d;
    }
  return coords;
}

MaskedSamples apply_mask(const RirGrid& grid, const ObservationMask& mask) {
  grid.validate();
  mask.validate();
  if (mask.total_channels != grid.channels())
    throw DataError("mask: built for " + std::to_string(mask.total_channels) +
                    " channels but the grid has " + std::to_string(grid.channels()));
  const GridMeta meta = GridMeta::of(grid);
  const Index N = grid.samples();
  MaskedSamples out;
  out.lattice.coords = lattice_coordinates(meta);
  out.lattice.values = Eigen::Map<const Eigen::VectorXd>(grid.data.data(), grid.data.size());
  out.lattice.channels = grid.channels();

  const Index k = static_cast<Index>(mask.indices.size());
  out.observed.coords.resize(2, k * N);
  out.observed.values.resize(k * N);
  out.observed.channels = k;
  for (Index i = 0; i < k; ++i) {
    const Index m = mask.indices[static_cast<std::size_t>(i)];
    out.observed.coords.middleCols(i * N, N) = out.lattice.coords.middleCols(m * N, N);
    out.observed.values.segment(i * N, N) = grid.data.col(m);
  }
  return out;
}

RirGrid normalize_peak(const RirGrid& grid) {
  const double peak = grid.data.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw DataError("normalize_peak: grid is identically zero");
  RirGrid out = grid;
  if (peak == 1.0) return out;
  out.data /= peak;
  out.peak_scale = grid.peak_scale * peak;
  return out;
}

RirGrid denormalize(const RirGrid& grid) {
  RirGrid out = grid;
  if (grid.peak_scale != 1.0) out.data *= grid.peak_scale;
  out.peak_scale = 1.0;
  return out;
}

void write_grid(const std::filesystem::path& path, const RirGrid& grid) {
  grid.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GridIoError(GridIoError::Kind::kIo, "cannot open " + path.string() + " for writing");
  out.write(kGridMagic, 4);
  detail::write_le<std::uint32_t>(out, kGridVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.samples()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.channels()));
  for (double v : {grid.fs, grid.d, grid.geometry.x_a, grid.geometry.z_a, grid.geometry.y_0, grid.peak_scale})
    detail::write_le(out, v);
  for (Index i = 0; i < grid.data.size(); ++i) detail::write_le(out, grid.data.data()[i]);
  if (!out) throw GridIoError(GridIoError::Kind::kIo, "write failed for " + path.string());
}

RirGrid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GridIoError(GridIoError::Kind::kIo, "cannot open " + path.string());
  const auto truncated = [&] {
    return GridIoError(GridIoError::Kind::kTruncated, path.string() + ": file is truncated");
  };
  char magic[4];
  if (!in.read(magic, 4)) throw truncated();
  if (std::memcmp(magic, kGridMagic, 4) != 0)
    throw GridIoError(GridIoError::Kind::kBadMagic, path.string() + ": not an RIRG file");
  std::uint32_t version = 0, n = 0, m = 0;
  if (!detail::read_le(in, version)) throw truncated();
  if (version != kGridVersion)
    throw GridIoError(GridIoError::Kind::kBadVersion,
                      path.string() + ": unsupported version " + std::to_string(version));
  if (!detail::read_le(in, n) || !detail::read_le(in, m)) throw truncated();
  RirGrid grid;
  double* meta[] = {&grid.fs, &grid.d, &grid.geometry.x_a, &grid.geometry.z_a, &grid.geometry.y_0,
                    &grid.peak_scale};
  for (double* field : meta)
    if (!detail::read_le(in, *field)) throw truncated();
  grid.data.resize(n, m);
  for (Index i = 0; i < grid.data.size(); ++i)
    if (!detail::read_le(in, grid.data.data()[i])) throw truncated();
  if (!grid.data.allFinite())
    throw GridIoError(GridIoError::Kind::kNonFinite, path.string() + ": payload contains NaN or Inf");
  grid.validate();
  return grid;
}

void write_grid_csv(const std::filesystem::path& path, const RirGrid& grid) {
  grid.validate();
  std::ofstream out(path);
  if (!out) throw GridIoError(GridIoError::Kind::kIo, "cannot open " + path.string() + " for writing");
  out << "# fs=" << format_double(grid.fs) << "\n# d=" << format_double(grid.d)
      << "\n# x_a=" << format_double(grid.geometry.x_a) << "\n# z_a=" << format_double(grid.geometry.z_a)
      << "\n# y_0=" << format_double(grid.geometry.y_0)
      << "\n# peak_scale=" << format_double(grid.peak_scale) << '\n';
  for (Index n = 0; n < grid.samples(); ++n) {
    for (Index m = 0; m < grid.channels(); ++m) {
      if (m > 0) out << ',';
      out << format_double(grid.data(n, m));
    }
    out << '\n';
  }
  if (!out) throw GridIoError(GridIoError::Kind::kIo, "write failed for " + path.string());
}

RirGrid read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GridIoError(GridIoError::Kind::kIo, "cannot open " + path.string());
  std::map<std::string, double> meta;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq != std::string::npos) {
        const std::string key = trim(t.substr(1, eq - 1));
        meta[key] = parse_double(t.substr(eq + 1), path.string() + " metadata '" + key + "'");
      }
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(t);
    std::string cell;
    while (std::getline(ss, cell, ','))
      row.push_back(parse_double(cell, path.string() + " line " + std::to_string(line_no)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw GridIoError(GridIoError::Kind::kParse,
                        path.string() + " line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw GridIoError(GridIoError::Kind::kParse, path.string() + ": no data rows");
  RirGrid grid;
  auto take = [&](const char* key, double& field) {
    if (auto it = meta.find(key); it != meta.end()) field = it->second;
  };
  take("fs", grid.fs);
  take("d", grid.d);
  take("x_a", grid.geometry.x_a);
  take("z_a", grid.geometry.z_a);
  take("y_0", grid.geometry.y_0);
  take("peak_scale", grid.peak_scale);
  grid.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index n = 0; n < grid.data.rows(); ++n)
    for (Index m = 0; m < grid.data.cols(); ++m)
      grid.data(n, m) = rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
  if (!grid.data.allFinite())
    throw GridIoError(GridIoError::Kind::kNonFinite, path.string() + ": contains NaN or Inf");
  grid.validate();
  return grid;
}

void write_mask(const std::filesystem::path& path, const ObservationMask& mask) {
  mask.validate();
  std::ofstream out(path);
  if (!out) throw GridIoError(GridIoError::Kind::kIo, "cannot open " + path.string() + " for writing");
  out << "# observed channels (0-based) of " << mask.total_channels << '\n';
  for (Index i : mask.indices) out << i << '\n';
  if (!out) throw GridIoError(GridIoError::Kind::kIo, "write failed for " + path.string());
}

ObservationMask read_mask(const std::filesystem::path& path, Index total_channels) {
  std::ifstream in(path);
  if (!in) throw GridIoError(GridIoError::Kind::kIo, "cannot open " + path.string());
  ObservationMask mask;
  mask.total_channels = total_channels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
      throw GridIoError(GridIoError::Kind::kParse,
                        path.string() + " line " + std::to_string(line_no) + ": expected a channel index");
    mask.indices.push_back(static_cast<Index>(v));
  }
  mask.validate();
  return mask;
}

}  // namespace rirpinn
