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

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "rirpinn/metrics.hpp"

namespace rirpinn::cli {

// Output directory named by paths.out (default: current directory).
std::filesystem::path output_dir(const ExperimentConfig& config);

// Writes <dir>/manifest.ini: the command name and the full config, which
// `rirpinn <command> --config <dir>/manifest.ini` re-runs.
void write_run_manifest(const std::filesystem::path& dir, const std::string& command,
                        const ExperimentConfig& config);

// Loads the observation mask named by paths.mask, or draws one from the
// mask section when no file is given.
ObservationMask resolve_mask(const ExperimentConfig& config, Eigen::Index channels);

// Heatmap with time running down the rows and channels across the columns;
// amplitude maps linearly to gray, symmetric about zero (0 at -peak, 255
// at +peak).
void write_pgm(const std::filesystem::path& path, const RirGrid& grid);

// The eight-point grid 1e-16, 1e-14, ..., 1e-2.
std::vector<double> default_lambda_grid();

struct SweepPoint {
  double lambda = 0.0;
  NmseReport nmse;
  TrainReport report;
};

// Trains one network per lambda (up to `jobs` at a time) and scores each
// reconstruction against `reference` over all channels.
std::vector<SweepPoint> sweep_lambda(const TrainConfig& base, const RirGrid& grid, const ObservationMask& mask,
                                     const RirGrid& reference, const std::vector<double>& lambdas, unsigned jobs,
                                     const std::function<void(const SweepPoint&)>& on_done = {});

// Index of the lowest overall NMSE.
std::size_t best_point(const std::vector<SweepPoint>& points);

void cmd_simulate(const ExperimentConfig& config);
void cmd_mask(const ExperimentConfig& config);
TrainReport cmd_train(const ExperimentConfig& config);
NmseReport cmd_evaluate(const ExperimentConfig& config);
void cmd_render(const ExperimentConfig& config, const std::filesystem::path& image, const std::filesystem::path& csv);
std::vector<SweepPoint> cmd_sweep_lambda(const ExperimentConfig& config, const std::vector<double>& lambdas);

}  // namespace rirpinn::cli
