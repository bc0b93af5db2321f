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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "rirpinn/grids.hpp"
#include "rirpinn/network.hpp"
#include "rirpinn/physics.hpp"
#include "rirpinn/simulator.hpp"
#include "rirpinn/trainer.hpp"

namespace rirpinn::cli {

// Every setting of a run, loaded from an INI-style document with the
// sections room, array, network, train, physics, mask and paths.
struct ExperimentConfig {
  RoomSpec room;
  Eigen::Index samples = 160;
  int max_order = 20;

  UlaSpec array;

  NetworkConfig network;

  int iterations = 2000;
  double lr = 1e-4;
  std::uint64_t train_seed = 0;
  int log_every = 100;
  Variant variant = Variant::kPiSiren;
  unsigned threads = 1;  // 0: one per hardware thread
  bool track_pde = true;

  PhysicsConfig physics;

  Eigen::Index observed = 33;
  std::uint64_t mask_seed = 0;

  std::map<std::string, std::string> paths;  // grid, mask, estimate, reference, results, out

  // The training configuration with the variant applied.
  TrainConfig train_config() const;
};

// Applies "section.key = value" to the config; unknown keys and malformed
// values raise UsageError.
void set_value(ExperimentConfig& config, const std::string& key, const std::string& value);

// Reads an INI document on top of the given config. A missing or
// unreadable file raises DataError.
void load_config(const std::filesystem::path& path, ExperimentConfig& config);
void parse_config(std::istream& in, const std::string& origin, ExperimentConfig& config);

// Writes the config in the format load_config reads.
void write_config(std::ostream& out, const ExperimentConfig& config);

std::optional<std::filesystem::path> path_setting(const ExperimentConfig& config, const std::string& key);

}  // namespace rirpinn::cli
