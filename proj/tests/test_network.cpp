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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "oracles.hpp"
#include "rirpinn/errors.hpp"
#include "rirpinn/network.hpp"

using namespace rirpinn;
using rirpinn::testing::plain_network;
using rirpinn::testing::random_points;
using rirpinn::testing::rel_err;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rirpinn_test_network_" + name);
}

// Kolmogorov-Smirnov statistic of samples against U(-r, r).
double ks_uniform(std::vector<double> x, double r) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = (x[i] + r) / (2 * r);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - cdf), std::abs(cdf - static_cast<double>(i) / n)});
  }
  return d;
}

// Deterministic non-trivial physical frame: 0.01 s by 0.6 m.
CoordinateFrame test_frame() {
  CoordinateFrame f;
  f.duration = 0.01;
  f.span = 0.6;
  return f;
}

Eigen::Matrix2Xd physical_points(const CoordinateFrame& f, int n, std::uint64_t seed) {
  Eigen::Matrix2Xd p = random_points(2, n, seed, 0.05, 0.95);
  p.row(0) *= f.duration;
  p.row(1) *= f.span;
  return p;
}

}  // namespace

TEST_CASE("param_count") {
  CHECK(param_count(NetworkConfig{}) == 198401);

  NetworkConfig tiny;
  tiny.input_dim = 1;
  tiny.hidden_layers = 1;
  tiny.width = 1;
  CHECK(param_count(tiny) == 4);

  NetworkConfig small;
  small.input_dim = 3;
  small.hidden_layers = 2;
  small.width = 8;
  CHECK(param_count(small) == 113);
  CHECK(init(small, 0).flat().size() == 113);
}

TEST_CASE("config validation") {
  NetworkConfig c;
  c.width = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = NetworkConfig{};
  c.hidden_layers = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = NetworkConfig{};
  c.omega0_hidden = 0.0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  CHECK(parse_activation("tanh") == Activation::kTanh);
  CHECK(to_string(Activation::kSine) == "sine");
  CHECK_THROWS_AS(parse_activation("relu"), UsageError);
  CHECK_THROWS_AS(SirenParams(NetworkConfig{}, Eigen::VectorXd::Zero(5)), DataError);
}

TEST_CASE("init is deterministic and respects the declared ranges") {
  const NetworkConfig c;
  const SirenParams a = init(c, 42);
  const SirenParams b = init(c, 42);
  CHECK(a.flat() == b.flat());
  CHECK(a.flat() != init(c, 43).flat());

  CHECK(a.weight(0).cwiseAbs().maxCoeff() < 0.5);
  CHECK(a.bias(0).cwiseAbs().maxCoeff() < 0.5);
  for (std::size_t l = 1; l < a.layers().size(); ++l) {
    const double r = std::sqrt(6.0 / static_cast<double>(a.layers()[l].fan_in)) / c.omega0_hidden;
    CHECK(a.weight(l).cwiseAbs().maxCoeff() < r);
    CHECK(a.bias(l).cwiseAbs().maxCoeff() < r);
  }
}

TEST_CASE("init draws match the uniform distribution") {
  NetworkConfig c;
  c.hidden_layers = 2;
  c.width = 320;
  const SirenParams p = init(c, 5);
  const auto w = p.weight(1);
  REQUIRE(w.size() >= 100000);
  const double r = std::sqrt(6.0 / 320.0) / c.omega0_hidden;
  CHECK(ks_uniform(std::vector<double>(w.data(), w.data() + 100000), r) < 0.01);
}

TEST_CASE("forward closed forms") {
  const SirenParams zero(NetworkConfig{}, Eigen::VectorXd::Zero(198401));
  CHECK(forward(zero, random_points(2, 7, 1)).cwiseAbs().maxCoeff() == 0.0);

  NetworkConfig c;
  c.input_dim = 1;
  c.hidden_layers = 1;
  c.width = 1;
  SirenParams p(c, Eigen::VectorXd::Zero(4));
  p.weight(0)(0, 0) = 0.1;
  p.bias(0)[0] = 0.2;
  p.weight(1)(0, 0) = -1.5;
  p.bias(1)[0] = 0.0;
  CHECK(forward(p, Eigen::MatrixXd::Zero(1, 1))[0] == doctest::Approx(-1.5 * std::sin(0.2)).epsilon(1e-15));
  CHECK(forward(p, Eigen::MatrixXd::Constant(1, 1, 0.5))[0] ==
        doctest::Approx(-1.5 * std::sin(15 * 0.1 * 0.5 + 0.2)).epsilon(1e-15));

  CHECK_THROWS_AS(forward(p, Eigen::MatrixXd::Zero(2, 3)), DataError);
}

TEST_CASE("forward matches a straight-line evaluation") {
  const SirenParams p = init(NetworkConfig{}, 3);
  const Eigen::MatrixXd x = random_points(2, 100, 4);
  const Eigen::VectorXd out = forward(p, x);
  REQUIRE(out.size() == 100);
  double scale = 0.0;
  for (Eigen::Index j = 0; j < 100; ++j) scale = std::max(scale, std::abs(out[j]));
  for (Eigen::Index j = 0; j < 100; ++j)
    CHECK(std::abs(out[j] - plain_network(p, {x(0, j), x(1, j)})) <= 1e-12 * std::max(scale, 1e-3));
}

TEST_CASE("physical coordinates map to [-1, 1]") {
  const CoordinateFrame f = CoordinateFrame::for_grid(GridMeta{80, 32, 8000.0, 0.0202});
  CHECK(f.duration == doctest::Approx(79.0 / 8000.0));
  CHECK(f.span == doctest::Approx(31 * 0.0202));
  Eigen::Matrix2Xd p(2, 2);
  p << 0.0, f.duration, 0.0, f.span;
  const Eigen::Matrix2Xd n = f.normalize(p);
  CHECK(n(0, 0) == -1.0);
  CHECK(n(1, 0) == -1.0);
  CHECK(n(0, 1) == doctest::Approx(1.0));
  CHECK(n(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("one-layer plane wave has analytic second derivatives") {
  const CoordinateFrame f = test_frame();
  const double a = 900.0, b = 7.0;
  const SirenParams p = rirpinn::testing::plane_wave_net(f, a, b, 0.0);
  const Eigen::Matrix2Xd x = physical_points(f, 20, 9);
  const WaveDerivatives d = forward_with_derivs(p, f, x);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double h = std::sin(a * x(0, j) + b * x(1, j));
    CHECK(d.value[j] == doctest::Approx(h).epsilon(1e-12).scale(1.0));
    CHECK(d.d2t[j] == doctest::Approx(-a * a * h).epsilon(1e-10).scale(a * a));
    CHECK(d.d2y[j] == doctest::Approx(-b * b * h).epsilon(1e-10).scale(b * b));
  }
}

TEST_CASE("tanh variant with zero weights is identically zero") {
  NetworkConfig c;
  c.activation = Activation::kTanh;
  c.width = 16;
  const SirenParams p(c, Eigen::VectorXd::Zero(param_count(c)));
  const WaveDerivatives d = forward_with_derivs(p, test_frame(), physical_points(test_frame(), 10, 1));
  CHECK(d.value.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.d2t.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.d2y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward and forward_with_derivs agree bit-identically") {
  const SirenParams p = init(NetworkConfig{}, 8);
  const CoordinateFrame f = test_frame();
  const Eigen::Matrix2Xd x = physical_points(f, 300, 2);
  CHECK(forward(p, f, x) == forward_with_derivs(p, f, x).value);
}

TEST_CASE("physical second derivatives match stencils for both activations") {
  const CoordinateFrame f = test_frame();
  for (Activation act : {Activation::kSine, Activation::kTanh}) {
    NetworkConfig c;
    c.activation = act;
    const SirenParams p = init(c, 17);
    const Eigen::Matrix2Xd x = physical_points(f, 32, 18);
    const WaveDerivatives d = forward_with_derivs(p, f, x);
    const double ht = 1e-4 * f.duration, hy = 1e-4 * f.span;
    const double floor_t = 1e-2 * d.d2t.cwiseAbs().maxCoeff();
    const double floor_y = 1e-2 * d.d2y.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      auto along = [&](int axis) {
        return [&, axis](double s) {
          Eigen::Matrix2Xd q = x.col(j);
          q(axis, 0) += s;
          return forward(p, f, q)[0];
        };
      };
      const double st = rirpinn::testing::second_difference5(along(0), 0.0, ht);
      const double sy = rirpinn::testing::second_difference5(along(1), 0.0, hy);
      CAPTURE(to_string(act));
      CAPTURE(j);
      CHECK(rel_err(d.d2t[j], st, floor_t) < 1e-5);
      CHECK(rel_err(d.d2y[j], sy, floor_y) < 1e-5);
    }
  }
}

TEST_CASE("checkpoint round trip") {
  NetworkConfig c;
  c.width = 12;
  c.hidden_layers = 2;
  c.activation = Activation::kTanh;
  c.omega0_first = 2.5;
  const SirenParams p = init(c, 4);
  const auto path = temp_file("ok.sirn");
  write_checkpoint(path, p);
  const SirenParams q = read_checkpoint(path);
  CHECK(q.flat() == p.flat());
  CHECK(q.config().width == 12);
  CHECK(q.config().hidden_layers == 2);
  CHECK(q.config().activation == Activation::kTanh);
  CHECK(q.config().omega0_first == 2.5);
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint errors") {
  const SirenParams p = init(NetworkConfig{.width = 4}, 1);
  const auto path = temp_file("bad.sirn");
  write_checkpoint(path, p);
  const auto size = std::filesystem::file_size(path);

  std::filesystem::resize_file(path, size - 3);
  CHECK_THROWS_AS(read_checkpoint(path), DataError);

  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE and then some more bytes";
  }
  CHECK_THROWS_AS(read_checkpoint(path), DataError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_checkpoint(path), DataError);
}
