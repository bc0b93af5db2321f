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

#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "rirpinn/errors.hpp"

namespace rirpinn::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw UsageError("config: " + key + " expects a number, got '" + text + "'");
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& text) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw UsageError("config: " + key + " expects an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw UsageError("config: " + key + " expects true or false, got '" + text + "'");
}

template <std::size_t N>
std::array<double, N> to_doubles(const std::string& key, const std::string& text) {
  const auto w = words(text);
  if (w.size() != N)
    throw UsageError("config: " + key + " expects " + std::to_string(N) + " numbers, got '" + text + "'");
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = to_double(key, w[i]);
  return out;
}

Eigen::Vector3d to_vec3(const std::string& key, const std::string& text) {
  const auto a = to_doubles<3>(key, text);
  return {a[0], a[1], a[2]};
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(const Eigen::Vector3d& v) { return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z()); }

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"room.dims", [](auto& c, auto& k, auto& v) { c.room.dims = to_vec3(k, v); }},
      {"room.t60",
       [](auto& c, auto& k, auto& v) {
         if (v == "none") c.room.t60.reset();
         else c.room.t60 = to_double(k, v);
       }},
      {"room.beta", [](auto& c, auto& k, auto& v) { c.room.beta = to_doubles<6>(k, v); }},
      {"room.source", [](auto& c, auto& k, auto& v) { c.room.source = to_vec3(k, v); }},
      {"room.c", [](auto& c, auto& k, auto& v) { c.room.c = to_double(k, v); }},
      {"room.fs", [](auto& c, auto& k, auto& v) { c.room.fs = to_double(k, v); }},
      {"room.samples", [](auto& c, auto& k, auto& v) { c.samples = to_int<Eigen::Index>(k, v); }},
      {"room.max_order", [](auto& c, auto& k, auto& v) { c.max_order = to_int<int>(k, v); }},
      {"array.m", [](auto& c, auto& k, auto& v) { c.array.m = to_int<Eigen::Index>(k, v); }},
      {"array.d", [](auto& c, auto& k, auto& v) { c.array.d = to_double(k, v); }},
      {"array.x_a", [](auto& c, auto& k, auto& v) { c.array.x_a = to_double(k, v); }},
      {"array.z_a", [](auto& c, auto& k, auto& v) { c.array.z_a = to_double(k, v); }},
      {"array.y_0", [](auto& c, auto& k, auto& v) { c.array.y_0 = to_double(k, v); }},
      {"network.hidden_layers", [](auto& c, auto& k, auto& v) { c.network.hidden_layers = to_int<int>(k, v); }},
      {"network.width", [](auto& c, auto& k, auto& v) { c.network.width = to_int<int>(k, v); }},
      {"network.omega0_first", [](auto& c, auto& k, auto& v) { c.network.omega0_first = to_double(k, v); }},
      {"network.omega0_hidden", [](auto& c, auto& k, auto& v) { c.network.omega0_hidden = to_double(k, v); }},
      {"network.activation", [](auto& c, auto&, auto& v) { c.network.activation = parse_activation(v); }},
      {"train.iterations", [](auto& c, auto& k, auto& v) { c.iterations = to_int<int>(k, v); }},
      {"train.lr", [](auto& c, auto& k, auto& v) { c.lr = to_double(k, v); }},
      {"train.seed", [](auto& c, auto& k, auto& v) { c.train_seed = to_int<std::uint64_t>(k, v); }},
      {"train.log_every", [](auto& c, auto& k, auto& v) { c.log_every = to_int<int>(k, v); }},
      {"train.variant", [](auto& c, auto&, auto& v) { c.variant = parse_variant(v); }},
      {"train.threads", [](auto& c, auto& k, auto& v) { c.threads = to_int<unsigned>(k, v); }},
      {"train.track_pde", [](auto& c, auto& k, auto& v) { c.track_pde = to_bool(k, v); }},
      {"physics.c", [](auto& c, auto& k, auto& v) { c.physics.c = to_double(k, v); }},
      {"physics.lambda", [](auto& c, auto& k, auto& v) { c.physics.lambda = to_double(k, v); }},
      {"physics.mean_over_time", [](auto& c, auto& k, auto& v) { c.physics.mean_over_time = to_bool(k, v); }},
      {"mask.observed", [](auto& c, auto& k, auto& v) { c.observed = to_int<Eigen::Index>(k, v); }},
      {"mask.seed", [](auto& c, auto& k, auto& v) { c.mask_seed = to_int<std::uint64_t>(k, v); }},
  };
  return table;
}

const char* const kPathKeys[] = {"grid", "mask", "estimate", "reference", "results", "out"};

}  // namespace

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.iterations = iterations;
  t.lr = lr;
  t.seed = train_seed;
  t.network = network;
  t.physics = physics;
  t.log_every = log_every;
  t.track_pde = track_pde;
  return t.with_variant(variant);
}

void set_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key.rfind("paths.", 0) == 0) {
    const std::string name = key.substr(6);
    for (const char* k : kPathKeys) {
      if (name == k) {
        config.paths[name] = value;
        return;
      }
    }
    throw UsageError("config: unknown key '" + key + "'");
  }
  const auto it = setters().find(key);
  if (it == setters().end()) throw UsageError("config: unknown key '" + key + "'");
  it->second(config, key, value);
}

void parse_config(std::istream& in, const std::string& origin, ExperimentConfig& config) {
  std::string section;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const std::string t = trim(line.substr(0, line.find_first_of("#;")));
    if (t.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') throw UsageError(where + "malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(where + "expected key = value");
    if (section.empty()) throw UsageError(where + "key outside of a section");
    try {
      set_value(config, section + "." + trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(where + e.what());
    }
  }
}

void load_config(const std::filesystem::path& path, ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  parse_config(in, path.string(), config);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "[room]\n"
      << "dims = " << fmt(c.room.dims) << '\n'
      << "t60 = " << (c.room.t60 ? fmt(*c.room.t60) : "none") << '\n'
      << "beta =";
  for (double b : c.room.beta) out << ' ' << fmt(b);
  out << '\n'
      << "source = " << fmt(c.room.source) << '\n'
      << "c = " << fmt(c.room.c) << '\n'
      << "fs = " << fmt(c.room.fs) << '\n'
      << "samples = " << c.samples << '\n'
      << "max_order = " << c.max_order << "\n\n"
      << "[array]\n"
      << "m = " << c.array.m << '\n'
      << "d = " << fmt(c.array.d) << '\n'
      << "x_a = " << fmt(c.array.x_a) << '\n'
      << "z_a = " << fmt(c.array.z_a) << '\n'
      << "y_0 = " << fmt(c.array.y_0) << "\n\n"
      << "[network]\n"
      << "hidden_layers = " << c.network.hidden_layers << '\n'
      << "width = " << c.network.width << '\n'
      << "omega0_first = " << fmt(c.network.omega0_first) << '\n'
      << "omega0_hidden = " << fmt(c.network.omega0_hidden) << '\n'
      << "activation = " << to_string(c.network.activation) << "\n\n"
      << "[train]\n"
      << "iterations = " << c.iterations << '\n'
      << "lr = " << fmt(c.lr) << '\n'
      << "seed = " << c.train_seed << '\n'
      << "log_every = " << c.log_every << '\n'
      << "variant = " << to_string(c.variant) << '\n'
      << "threads = " << c.threads << '\n'
      << "track_pde = " << (c.track_pde ? "true" : "false") << "\n\n"
      << "[physics]\n"
      << "c = " << fmt(c.physics.c) << '\n'
      << "lambda = " << fmt(c.physics.lambda) << '\n'
      << "mean_over_time = " << (c.physics.mean_over_time ? "true" : "false") << "\n\n"
      << "[mask]\n"
      << "observed = " << c.observed << '\n'
      << "seed = " << c.mask_seed << '\n';
  if (!c.paths.empty()) {
    out << "\n[paths]\n";
    for (const auto& [k, v] : c.paths) out << k << " = " << v << '\n';
  }
}

std::optional<std::filesystem::path> path_setting(const ExperimentConfig& config, const std::string& key) {
  const auto it = config.paths.find(key);
  if (it == config.paths.end() || it->second.empty()) return std::nullopt;
  return std::filesystem::path(it->second);
}

}  // namespace rirpinn::cli
