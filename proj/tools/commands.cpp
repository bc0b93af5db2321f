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

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "rirpinn/diffcore/parallel.hpp"
#include "rirpinn/errors.hpp"

namespace rirpinn::cli {

namespace fs = std::filesystem;

namespace {

fs::path required_path(const ExperimentConfig& config, const std::string& key) {
  const auto p = path_setting(config, key);
  if (!p) throw UsageError("missing input: set paths." + key + " or pass --" + key);
  return *p;
}

fs::path prepare_output_dir(const ExperimentConfig& config) {
  const fs::path dir = output_dir(config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

void log_progress(int iteration, const LossBreakdown& l) {
  std::clog << "iter " << iteration << "  data " << l.data_term << "  pde " << l.pde_term_unweighted << "  total "
            << l.total << '\n';
}

void write_train_report(const fs::path& path, const TrainReport& r, const NmseReport& nmse,
                        const ExperimentConfig& config) {
  std::ofstream out = open_output(path);
  out.precision(17);
  const LossBreakdown last = r.history.empty() ? LossBreakdown{} : r.history.back();
  out << "[report]\n"
      << "variant = " << to_string(config.variant) << '\n'
      << "seed = " << r.seed << '\n'
      << "iterations = " << r.history.size() << '\n'
      << "lambda = " << r.config.physics.lambda << '\n'
      << "activation = " << to_string(r.config.network.activation) << '\n'
      << "parameters = " << r.params.flat().size() << '\n'
      << "peak_scale = " << r.peak_scale << '\n'
      << "final_data_term = " << last.data_term << '\n'
      << "final_pde_term = " << last.pde_term_unweighted << '\n'
      << "final_total = " << last.total << '\n'
      << "nmse_db = " << format_db(nmse.overall_db) << '\n'
      << "nmse_observed_db = " << format_db(nmse.observed_db) << '\n'
      << "nmse_missing_db = " << format_db(nmse.missing_db) << "\n\n";
  write_config(out, config);
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

fs::path output_dir(const ExperimentConfig& config) { return path_setting(config, "out").value_or("."); }

void write_run_manifest(const fs::path& dir, const std::string& command, const ExperimentConfig& config) {
  std::ofstream out = open_output(dir / "manifest.ini");
  out << "# command: " << command << '\n';
  out << "# re-run: rirpinn " << command << " --config " << (dir / "manifest.ini").string() << "\n\n";
  write_config(out, config);
  if (!out) throw DataError("write failed for " + (dir / "manifest.ini").string());
}

ObservationMask resolve_mask(const ExperimentConfig& config, Eigen::Index channels) {
  if (const auto p = path_setting(config, "mask")) return read_mask(*p, channels);
  return random_mask(channels, config.observed, config.mask_seed);
}

void write_pgm(const fs::path& path, const RirGrid& grid) {
  const Eigen::Index rows = grid.samples(), cols = grid.channels();
  const double peak = grid.data.cwiseAbs().maxCoeff();
  std::ofstream out = open_output(path, std::ios::binary);
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  for (Eigen::Index n = 0; n < rows; ++n) {
    for (Eigen::Index m = 0; m < cols; ++m) {
      const double u = peak > 0.0 ? grid.data(n, m) / peak : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(127.5 * (u + 1.0)))));
    }
  }
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<double> default_lambda_grid() {
  std::vector<double> out;
  for (int e = -16; e <= -2; e += 2) out.push_back(std::pow(10.0, e));
  return out;
}

std::vector<SweepPoint> sweep_lambda(const TrainConfig& base, const RirGrid& grid, const ObservationMask& mask,
                                     const RirGrid& reference, const std::vector<double>& lambdas, unsigned jobs,
                                     const std::function<void(const SweepPoint&)>& on_done) {
  std::vector<std::optional<SweepPoint>> slots(lambdas.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex, report_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < lambdas.size();) {
      try {
        TrainConfig cfg = base;
        cfg.physics.lambda = lambdas[i];
        TrainReport report = train(cfg, grid, mask);
        NmseReport score = nmse(reconstruct(report.params, report.meta, report.peak_scale), reference, &mask);
        slots[i] = SweepPoint{lambdas[i], std::move(score), std::move(report)};
        if (on_done) {
          std::lock_guard lock(report_mutex);
          on_done(*slots[i]);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(lambdas.size())));
  if (n == 1) {
    worker();
  } else {
    const unsigned saved = diffcore::thread_count();
    diffcore::set_thread_count(1);
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    diffcore::set_thread_count(saved);
  }
  if (error) std::rethrow_exception(error);
  std::vector<SweepPoint> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::size_t best_point(const std::vector<SweepPoint>& points) {
  if (points.empty()) throw UsageError("sweep: no points");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].nmse.overall_db < points[best].nmse.overall_db) best = i;
  return best;
}

void cmd_simulate(const ExperimentConfig& config) {
  config.room.validate();
  const RirGrid grid = simulate_grid(config.room, config.array, config.samples, config.max_order);
  const fs::path dir = prepare_output_dir(config);
  write_grid(dir / "grid.rirg", grid);
  write_manifest(dir / "simulation.txt", config.room, config.array, config.samples, config.max_order);
  write_run_manifest(dir, "simulate", config);
}

void cmd_mask(const ExperimentConfig& config) {
  Eigen::Index channels = config.array.m;
  if (const auto grid = path_setting(config, "grid")) channels = read_grid(*grid).channels();
  const ObservationMask mask = random_mask(channels, config.observed, config.mask_seed);
  const fs::path dir = prepare_output_dir(config);
  write_mask(dir / "mask.txt", mask);
  write_run_manifest(dir, "mask", config);
}

TrainReport cmd_train(const ExperimentConfig& config) {
  const RirGrid grid = read_grid(required_path(config, "grid"));
  const ObservationMask mask = resolve_mask(config, grid.channels());
  TrainConfig tc = config.train_config();
  const fs::path dir = prepare_output_dir(config);
  diffcore::set_thread_count(config.threads);
  TrainReport report = [&] {
    try {
      return train(tc, grid, mask, log_progress);
    } catch (const TrainingAborted& e) {
      write_checkpoint(dir / "checkpoint_last_finite.sirn", e.last_finite());
      throw;
    }
  }();
  write_checkpoint(dir / "checkpoint.sirn", report.params);
  write_history_csv(dir / "history.csv", report);
  const RirGrid estimate = reconstruct(report.params, report.meta, report.peak_scale);
  write_grid(dir / "reconstruction.rirg", estimate);
  const NmseReport score = nmse(estimate, grid, &mask);
  write_train_report(dir / "report.txt", report, score, config);
  write_run_manifest(dir, "train", config);
  std::clog << "trained " << report.history.size() << " iterations in " << report.wall_seconds
            << " s; NMSE against the input grid " << format_db(score.overall_db) << " dB\n";
  return report;
}

NmseReport cmd_evaluate(const ExperimentConfig& config) {
  const RirGrid estimate = read_grid(required_path(config, "estimate"));
  const RirGrid reference = read_grid(required_path(config, "reference"));
  std::optional<ObservationMask> mask;
  if (const auto p = path_setting(config, "mask")) mask = read_mask(*p, reference.channels());
  const NmseReport report = nmse(estimate, reference, mask ? &*mask : nullptr);
  const fs::path dir = prepare_output_dir(config);
  write_nmse_csv(dir / "nmse.csv", report, mask ? &*mask : nullptr);
  write_nmse_summary(dir / "nmse.txt", report);
  write_run_manifest(dir, "evaluate", config);
  if (const auto results = path_setting(config, "results")) {
    const bool fresh = !fs::exists(*results) || fs::file_size(*results) == 0;
    std::ofstream out = open_output(*results, std::ios::app);
    if (fresh) out << "variant,observed,nmse_db\n";
    const auto observed = mask ? static_cast<Eigen::Index>(mask->indices.size()) : config.observed;
    out << to_string(config.variant) << ',' << observed << ',' << format_db(report.overall_db) << '\n';
    if (!out) throw DataError("write failed for " + results->string());
  }
  std::cout << "nmse_db = " << format_db(report.overall_db) << '\n';
  return report;
}

void cmd_render(const ExperimentConfig& config, const fs::path& image, const fs::path& csv) {
  const RirGrid grid = read_grid(required_path(config, "grid"));
  const fs::path dir = prepare_output_dir(config);
  write_pgm(image.empty() ? dir / "image.pgm" : image, grid);
  write_grid_csv(csv.empty() ? dir / "grid.csv" : csv, grid);
  write_run_manifest(dir, "render", config);
}

std::vector<SweepPoint> cmd_sweep_lambda(const ExperimentConfig& config, const std::vector<double>& lambdas) {
  const RirGrid grid = read_grid(required_path(config, "grid"));
  const ObservationMask mask = resolve_mask(config, grid.channels());
  const RirGrid reference = path_setting(config, "reference") ? read_grid(*path_setting(config, "reference")) : grid;
  ExperimentConfig c = config;
  c.variant = config.variant == Variant::kSiren ? Variant::kPiSiren : config.variant;
  const fs::path dir = prepare_output_dir(config);
  const unsigned jobs = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  const auto points = sweep_lambda(c.train_config(), grid, mask, reference, lambdas, jobs, [](const SweepPoint& p) {
    std::clog << "lambda " << p.lambda << "  nmse " << format_db(p.nmse.overall_db) << " dB\n";
  });
  std::ofstream out = open_output(dir / "sweep.csv");
  out.precision(17);
  out << "lambda,nmse_db,observed_db,missing_db,final_total\n";
  for (const SweepPoint& p : points)
    out << p.lambda << ',' << format_db(p.nmse.overall_db) << ',' << format_db(p.nmse.observed_db) << ','
        << format_db(p.nmse.missing_db) << ',' << (p.report.history.empty() ? 0.0 : p.report.history.back().total)
        << '\n';
  if (!out) throw DataError("write failed for " + (dir / "sweep.csv").string());
  const SweepPoint& best = points[best_point(points)];
  std::ofstream b = open_output(dir / "best.txt");
  b.precision(17);
  b << "lambda = " << best.lambda << "\nnmse_db = " << format_db(best.nmse.overall_db) << '\n';
  write_run_manifest(dir, "sweep-lambda", c);
  std::cout << "best lambda = " << best.lambda << " (" << format_db(best.nmse.overall_db) << " dB)\n";
  return points;
}

}  // namespace rirpinn::cli
