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

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "rirpinn/diffcore/parallel.hpp"
#include "rirpinn/errors.hpp"

namespace {

using rirpinn::cli::ExperimentConfig;

// Flags shared by every subcommand; each one overrides the config file.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  std::optional<int> iterations;
  std::optional<double> lambda;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<long> observed;
  std::map<std::string, std::string> paths;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "INI config file (flags override its values)");
  cmd->add_option("--seed", f.seed, "seed (mask seed for `mask`, training seed otherwise)");
  cmd->add_option("--variant", f.variant, "pi-siren, siren or pinn-tanh");
  cmd->add_option("--iterations", f.iterations, "training iterations");
  cmd->add_option("--lambda", f.lambda, "weight of the wave-equation term");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads (0: all hardware threads)");
  cmd->add_option("--observed", f.observed, "number of observed channels for random masks");
}

void add_path(CLI::App* cmd, CommonFlags& f, const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      "--" + key, [&f, key](const std::string& v) { f.paths[key] = v; }, help);
}

ExperimentConfig resolve(const std::string& command, const CommonFlags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) rirpinn::cli::load_config(f.config, c);
  if (f.seed) (command == "mask" ? c.mask_seed : c.train_seed) = *f.seed;
  if (f.variant) c.variant = rirpinn::parse_variant(*f.variant);
  if (f.iterations) c.iterations = *f.iterations;
  if (f.lambda) c.physics.lambda = *f.lambda;
  if (f.out) c.paths["out"] = *f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.observed) c.observed = *f.observed;
  for (const auto& [k, v] : f.paths) c.paths[k] = v;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  rirpinn::diffcore::tune_allocator();
  CLI::App app{"Room impulse response reconstruction across a uniform linear array"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string image, csv;
  std::vector<double> lambdas;

  auto* simulate = app.add_subcommand("simulate", "simulate a shoebox room into grid.rirg");
  add_common(simulate, flags);
  auto* mask = app.add_subcommand("mask", "draw a random observation mask into mask.txt");
  add_common(mask, flags);
  add_path(mask, flags, "grid", "grid whose channel count the mask covers");
  auto* train = app.add_subcommand("train", "fit a network to the observed channels of a grid");
  add_common(train, flags);
  add_path(train, flags, "grid", "training grid (.rirg)");
  add_path(train, flags, "mask", "observation mask file (default: random from the mask section)");
  auto* evaluate = app.add_subcommand("evaluate", "NMSE of an estimate against a reference grid");
  add_common(evaluate, flags);
  add_path(evaluate, flags, "estimate", "estimated grid (.rirg)");
  add_path(evaluate, flags, "reference", "reference grid (.rirg)");
  add_path(evaluate, flags, "mask", "observation mask for the observed/missing split");
  add_path(evaluate, flags, "results", "results CSV to append a (variant, observed, nmse_db) row to");
  auto* render = app.add_subcommand("render", "render a grid as a PGM heatmap and a CSV matrix");
  add_common(render, flags);
  add_path(render, flags, "grid", "grid to render (.rirg)");
  render->add_option("--image", image, "image path (default: <out>/image.pgm)");
  render->add_option("--csv", csv, "CSV path (default: <out>/grid.csv)");
  auto* sweep = app.add_subcommand("sweep-lambda", "train across a logarithmic lambda grid");
  add_common(sweep, flags);
  add_path(sweep, flags, "grid", "training grid (.rirg)");
  add_path(sweep, flags, "mask", "observation mask file");
  add_path(sweep, flags, "reference", "reference grid for scoring (default: the training grid)");
  sweep->add_option("--lambdas", lambdas, "lambda values (default: 1e-16, 1e-14, ..., 1e-2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const ExperimentConfig config = resolve(command, flags);
    if (command == "simulate") rirpinn::cli::cmd_simulate(config);
    else if (command == "mask") rirpinn::cli::cmd_mask(config);
    else if (command == "train") rirpinn::cli::cmd_train(config);
    else if (command == "evaluate") rirpinn::cli::cmd_evaluate(config);
    else if (command == "render") rirpinn::cli::cmd_render(config, image, csv);
    else rirpinn::cli::cmd_sweep_lambda(config, lambdas.empty() ? rirpinn::cli::default_lambda_grid() : lambdas);
  } catch (const rirpinn::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const rirpinn::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
