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

// Independent reference computations used only by the tests. Nothing here
// touches the tape; each oracle re-derives its quantity the long way.

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rirpinn/network.hpp"

namespace rirpinn::testing {

// Central difference gradient of f at x with step h.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Three-point second difference (f(x+h) - 2 f(x) + f(x-h)) / h^2.
inline double second_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Five-point fourth-order second difference with step h.
inline double second_difference5(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h);
}

// Straight-line evaluation of the network at one normalized input, written
// with explicit loops and no Eigen products.
inline double plain_network(const SirenParams& params, const std::vector<double>& input) {
  const NetworkConfig& c = params.config();
  std::vector<double> x = input;
  const auto& flat = params.flat();
  for (const LayerShape& s : params.layers()) {
    std::vector<double> y(static_cast<std::size_t>(s.fan_out));
    for (Eigen::Index o = 0; o < s.fan_out; ++o) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < s.fan_in; ++i)
        acc += flat[s.weight_offset + i * s.fan_out + o] * x[static_cast<std::size_t>(i)];
      double z = s.gain * acc + flat[s.bias_offset + o];
      if (s.activated) z = c.activation == Activation::kSine ? std::sin(z) : std::tanh(z);
      y[static_cast<std::size_t>(o)] = z;
    }
    x = std::move(y);
  }
  return x[0];
}

// Straight-line Adam with the textbook update, one parameter at a time.
struct PlainAdam {
  double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> m, v;
  int t = 0;

  void step(std::vector<double>& p, const std::vector<double>& g) {
    if (m.empty()) {
      m.assign(p.size(), 0.0);
      v.assign(p.size(), 0.0);
    }
    ++t;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1 * m[i] + (1 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1 - beta2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(beta1, t));
      const double vh = v[i] / (1 - std::pow(beta2, t));
      p[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
};

// One-sine-layer network whose output is sin(a t + b y + phase) in physical
// coordinates of the given frame, plus a constant offset.
inline SirenParams plane_wave_net(const CoordinateFrame& f, double a, double b, double phase, double offset = 0.0,
                                  double amplitude = 1.0) {
  NetworkConfig c;
  c.hidden_layers = 1;
  c.width = 1;
  SirenParams p(c, Eigen::VectorXd::Zero(param_count(c)));
  // The layer sees z = w0 (2t/T - 1) + w1 (2y/Y - 1) times omega0, plus bias.
  p.weight(0)(0, 0) = a * f.duration / 2 / c.omega0_first;
  p.weight(0)(0, 1) = b * f.span / 2 / c.omega0_first;
  p.bias(0)[0] = c.omega0_first * (p.weight(0)(0, 0) + p.weight(0)(0, 1)) + phase;
  p.weight(1)(0, 0) = amplitude;
  p.bias(1)[0] = offset;
  return p;
}

// Small random network for derivative checks.
inline SirenParams random_small_net(int width, Activation act, std::uint64_t seed, int hidden_layers = 1,
                                    double omega_first = 3.0, double omega_hidden = 3.0) {
  NetworkConfig c;
  c.input_dim = 2;
  c.hidden_layers = hidden_layers;
  c.width = width;
  c.omega0_first = omega_first;
  c.omega0_hidden = omega_hidden;
  c.activation = act;
  SirenParams p = init(c, seed);
  // Spread the parameters beyond the tiny init ranges so all terms matter.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (Eigen::Index i = 0; i < p.flat().size(); ++i) p.flat()[i] += jitter(rng);
  return p;
}

inline Eigen::MatrixXd random_points(int dim, int count, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd x(dim, count);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

// Relative error of a against reference b with a floor on the scale.
inline double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace rirpinn::testing
