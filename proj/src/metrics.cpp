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

#include "rirpinn/metrics.hpp"

#include <fstream>
#include <sstream>

namespace rirpinn {

std::string format_db(double db) {
  if (std::isnan(db)) return "n/a";
  if (std::isinf(db)) return db < 0 ? "-inf" : "inf";
  std::ostringstream s;
  s.precision(17);
  s << db;
  return s.str();
}

NmseReport nmse(const RirGrid& estimate, const RirGrid& reference, const ObservationMask* mask) {
  const Eigen::ArrayXd ratios = nmse_ratios(estimate.data * estimate.peak_scale, reference.data * reference.peak_scale);
  NmseReport report;
  report.per_channel_db = ratios.unaryExpr([](double r) { return to_db(r); }).matrix();
  report.overall_db = to_db(ratios.mean());
  if (mask != nullptr) {
    mask->validate();
    if (mask->total_channels != reference.channels()) throw DataError("nmse: mask does not match the grid");
    double observed = 0.0, missing = 0.0;
    Eigen::Index n_observed = 0, n_missing = 0;
    for (Eigen::Index m = 0; m < ratios.size(); ++m) {
      if (mask->contains(m)) {
        observed += ratios[m];
        ++n_observed;
      } else {
        missing += ratios[m];
        ++n_missing;
      }
    }
    if (n_observed > 0) report.observed_db = to_db(observed / static_cast<double>(n_observed));
    if (n_missing > 0) report.missing_db = to_db(missing / static_cast<double>(n_missing));
  }
  return report;
}

void write_nmse_csv(const std::filesystem::path& path, const NmseReport& report, const ObservationMask* mask) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "channel,observed,nmse_db\n";
  for (Eigen::Index m = 0; m < report.per_channel_db.size(); ++m) {
    out << m << ',';
    if (mask != nullptr) out << (mask->contains(m) ? 1 : 0);
    out << ',' << format_db(report.per_channel_db[m]) << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

void write_nmse_summary(const std::filesystem::path& path, const NmseReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "overall_db = " << format_db(report.overall_db) << '\n'
      << "observed_db = " << format_db(report.observed_db) << '\n'
      << "missing_db = " << format_db(report.missing_db) << '\n'
      << "channels = " << report.per_channel_db.size() << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace rirpinn
