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
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rirpinn/errors.hpp"
#include "rirpinn/physics.hpp"

using namespace rirpinn;
using rirpinn::testing::plane_wave_net;
using rirpinn::testing::random_points;
using rirpinn::testing::rel_err;
using rirpinn::testing::second_difference5;

namespace {

const GridMeta kMeta{40, 16, 8000.0, 0.0202};

CoordinateFrame frame() { return CoordinateFrame::for_grid(kMeta); }

Eigen::Matrix2Xd interior_points(int n, std::uint64_t seed) {
  const CoordinateFrame f = frame();
  Eigen::Matrix2Xd p = random_points(2, n, seed, 0.05, 0.95);
  p.row(0) *= f.duration;
  p.row(1) *= f.span;
  return p;
}

SampleSet samples(Eigen::Matrix2Xd coords, Eigen::VectorXd values, Eigen::Index channels) {
  SampleSet s;
  s.coords = std::move(coords);
  s.values = std::move(values);
  s.channels = channels;
  return s;
}

SampleSet full_lattice() {
  const Eigen::Matrix2Xd coords = lattice_coordinates(kMeta);
  return samples(coords, Eigen::VectorXd::Zero(coords.cols()), kMeta.channels);
}

SampleSet permuted(const SampleSet& s, std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(s.size()));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
  SampleSet out = s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.coords.col(static_cast<Eigen::Index>(i)) = s.coords.col(order[i]);
    out.values[static_cast<Eigen::Index>(i)] = s.values[order[i]];
  }
  return out;
}

}  // namespace

TEST_CASE("aliasing limit") {
  CHECK(aliasing_limit(343.0, 0.0202) == doctest::Approx(8490.099).epsilon(1e-6));
  CHECK(std::abs(aliasing_limit(343.0, 0.0202) - 8489.0) < 2.0);
  CHECK(aliasing_limit(2.0, 1.0) == 1.0);
  CHECK(aliasing_limit(343.0, 0.03) == doctest::Approx(5716.667).epsilon(1e-6));
  CHECK_THROWS_AS(aliasing_limit(343.0, 0.0), UsageError);
  CHECK_THROWS_AS(aliasing_limit(343.0, -0.1), UsageError);
}

TEST_CASE("config validation") {
  PhysicsConfig p;
  p.c = 0.0;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = PhysicsConfig{};
  p.lambda = -1.0;
  CHECK_THROWS_AS(p.validate(), UsageError);
}

TEST_CASE("traveling waves have zero residual") {
  const CoordinateFrame f = frame();
  const double c = 343.0;
  const Eigen::Matrix2Xd x = interior_points(50, 1);
  for (double k : {0.5, 3.0, 10.0, 40.0}) {
    for (double phase : {0.0, 0.7}) {
      const Eigen::VectorXd r = wave_residual(plane_wave_net(f, -k * c, k, phase), f, x, c);
      CAPTURE(k);
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, k * k));
    }
  }
}

TEST_CASE("constant output has zero residual") {
  const CoordinateFrame f = frame();
  const SirenParams p = plane_wave_net(f, 0.0, 0.0, 0.0, 0.37, 0.0);
  CHECK(wave_residual(p, f, interior_points(20, 2), 343.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("residual matches a stencil-assembled residual") {
  const CoordinateFrame f = frame();
  const double c = 343.0;
  const SirenParams p = init(NetworkConfig{}, 21);
  const Eigen::Matrix2Xd x = interior_points(64, 22);
  const Eigen::VectorXd r = wave_residual(p, f, x, c);
  const double floor = 1e-2 * r.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto along = [&](int axis) {
      return [&, axis](double s) {
        Eigen::Matrix2Xd q = x.col(j);
        q(axis, 0) += s;
        return forward(p, f, q)[0];
      };
    };
    const double stencil = second_difference5(along(0), 0.0, 1e-4 * f.duration) / (c * c) -
                           second_difference5(along(1), 0.0, 1e-4 * f.span);
    CAPTURE(j);
    CHECK(rel_err(r[j], stencil, floor) < 1e-4);
  }
}

TEST_CASE("perfect prediction of an exact solution gives a zero loss") {
  const CoordinateFrame f = frame();
  const SirenParams p = plane_wave_net(f, 0.0, 0.0, 0.0, 0.0, 0.0);
  SampleSet obs = full_lattice();
  const LossBreakdown l = pinn_loss(p, f, obs, full_lattice(), PhysicsConfig{});
  CHECK(l.data_term == 0.0);
  CHECK(l.pde_term_unweighted == 0.0);
  CHECK(l.total == 0.0);
}

TEST_CASE("hand-evaluated data term") {
  const CoordinateFrame f = frame();
  const SirenParams zero = plane_wave_net(f, 0.0, 0.0, 0.0, 0.0, 0.0);
  Eigen::Matrix2Xd coords(2, 2);
  coords << 0.0, 1.0 / 8000.0, 0.0, 0.0;
  const SampleSet obs = samples(coords, Eigen::Vector2d(-0.1, 0.2), 1);
  PhysicsConfig cfg;
  cfg.lambda = 0.0;
  const LossBreakdown l = pinn_loss(zero, f, obs, full_lattice(), cfg);
  CHECK(l.data_term == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(l.total == l.data_term);

  cfg.mean_over_time = true;
  CHECK(pinn_loss(zero, f, obs, full_lattice(), cfg).data_term == doctest::Approx(0.025).epsilon(1e-15));
}

TEST_CASE("loss combination and invariances") {
  const CoordinateFrame f = frame();
  const SirenParams p = init(NetworkConfig{.width = 32}, 5);
  const MaskedSamples s = apply_mask(
      RirGrid{Eigen::MatrixXd(random_points(40, 16, 6)), 8000.0, 0.0202, {}, 1.0}, random_mask(16, 5, 7));

  PhysicsConfig cfg;
  cfg.lambda = 0.0;
  const LossBreakdown zero = pinn_loss(p, f, s.observed, s.lattice, cfg);
  CHECK(zero.total == zero.data_term);
  CHECK(zero.data_term > 0.0);
  CHECK(zero.pde_term_unweighted > 0.0);

  double previous = -1.0;
  for (double lambda : {0.0, 1e-12, 1e-8, 1e-4, 1.0}) {
    cfg.lambda = lambda;
    const LossBreakdown l = pinn_loss(p, f, s.observed, s.lattice, cfg);
    CHECK(l.data_term == zero.data_term);
    CHECK(l.pde_term_unweighted == zero.pde_term_unweighted);
    CHECK(l.total == doctest::Approx(l.data_term + lambda * l.pde_term_unweighted).epsilon(1e-14));
    CHECK(l.total >= previous);
    previous = l.total;
  }

  cfg.lambda = 1e-6;
  const LossBreakdown a = pinn_loss(p, f, s.observed, s.lattice, cfg);
  const LossBreakdown b = pinn_loss(p, f, permuted(s.observed, 1), permuted(s.lattice, 2), cfg);
  CHECK(b.data_term == doctest::Approx(a.data_term).epsilon(1e-12));
  CHECK(b.pde_term_unweighted == doctest::Approx(a.pde_term_unweighted).epsilon(1e-12));
  CHECK(b.total == doctest::Approx(a.total).epsilon(1e-12));
}

TEST_CASE("empty observation set is rejected") {
  const CoordinateFrame f = frame();
  const SirenParams p = init(NetworkConfig{.width = 4}, 1);
  CHECK_THROWS_AS(pinn_loss(p, f, SampleSet{}, full_lattice(), PhysicsConfig{}), DataError);
}
