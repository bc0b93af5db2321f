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
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "rirpinn/errors.hpp"
#include "rirpinn/simulator.hpp"

using namespace rirpinn;
using Eigen::Vector3d;

namespace {

RoomSpec with_betas(std::array<double, 6> beta) {
  RoomSpec room;
  room.t60.reset();
  room.beta = beta;
  return room;
}

Eigen::Index argmax_in(const Eigen::VectorXd& h, Eigen::Index lo, Eigen::Index hi) {
  lo = std::max<Eigen::Index>(lo, 0);
  hi = std::min<Eigen::Index>(hi, h.size() - 1);
  Eigen::Index best = lo;
  for (Eigen::Index k = lo; k <= hi; ++k)
    if (h[k] > h[best]) best = k;
  return best;
}

}  // namespace

TEST_CASE("Sabine conversion") {
  const Vector3d dims(6, 4, 3);
  CHECK(t60_to_beta(dims, 0.5) == doctest::Approx(0.8862).epsilon(1e-4));
  CHECK(std::sqrt(1.0 - 0.161 * 72 / (108 * 0.5)) == doctest::Approx(t60_to_beta(dims, 0.5)).epsilon(1e-15));
  CHECK(t60_to_beta(dims, std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(t60_to_beta(dims, 1e9) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(t60_to_beta(dims, 0.161 * 72 / 108) == 0.0);
  CHECK_THROWS_AS(t60_to_beta(dims, 0.05), UsageError);
  CHECK_THROWS_AS(t60_to_beta(dims, 0.0), UsageError);
}

TEST_CASE("delay kernel") {
  CHECK(delay_kernel(0.0) == 1.0);
  CHECK(delay_kernel(kDelayHalfWidth) == 0.0);
  CHECK(delay_kernel(50.0) == 0.0);
  for (double x : {0.3, 1.0, 7.25, 39.9}) CHECK(delay_kernel(x) == delay_kernel(-x));
  int taps = 0;
  for (int k = -60; k <= 60; ++k) taps += delay_kernel(k + 0.25) != 0.0 ? 1 : 0;
  CHECK(taps == 81);
}

TEST_CASE("free-field direct path") {
  const RoomSpec room = with_betas({0, 0, 0, 0, 0, 0});
  // 20 samples of travel at 8 kHz.
  const double r = 20.0 * room.c / room.fs;
  const Vector3d mic = room.source + Vector3d(r, 0, 0);
  const Eigen::VectorXd h = simulate_rir(room, mic, 64);
  Eigen::Index peak;
  h.cwiseAbs().maxCoeff(&peak);
  CHECK(peak == 20);
  CHECK(h[peak] == doctest::Approx(1.0 / (4 * std::numbers::pi * r)).epsilon(0.01));

  // Off-grid delay: the pulse centre still sits at fs r / c.
  const Vector3d off = room.source + Vector3d(1.3, 0.4, -0.2);
  const Eigen::VectorXd g = simulate_rir(room, off, 64);
  const double centre = room.fs * (off - room.source).norm() / room.c;
  g.maxCoeff(&peak);
  CHECK(std::abs(static_cast<double>(peak) - centre) <= 0.5);
}

TEST_CASE("mirror-symmetric microphones see identical responses") {
  RoomSpec room;
  room.source = Vector3d(2.2, 2.0, 1.1);
  const Eigen::VectorXd a = simulate_rir(room, Vector3d(4.1, 2.0 - 0.7, 1.6), 200);
  const Eigen::VectorXd b = simulate_rir(room, Vector3d(4.1, 2.0 + 0.7, 1.6), 200);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-13 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("floor reflection arrives at the image-source distance") {
  const RoomSpec room = with_betas({0, 0, 0, 0, 0.9, 0});
  const Vector3d mic(4.0, 2.5, 1.5);
  const Eigen::VectorXd h = simulate_rir(room, mic, 160);
  const Vector3d image(room.source.x(), room.source.y(), -room.source.z());
  const double direct = room.fs * (mic - room.source).norm() / room.c;
  const double expected = room.fs * (mic - image).norm() / room.c;
  REQUIRE(expected - direct > 3.0);
  const Eigen::Index found =
      argmax_in(h, static_cast<Eigen::Index>(std::ceil(direct + 2.0)), static_cast<Eigen::Index>(expected + 4.0));
  CHECK(std::abs(static_cast<double>(found) - expected) <= 1.0);
  // The reflected pulse is 0.9 / (4 pi r_image) at its centre.
  const double peak = 0.9 / (4 * std::numbers::pi * (mic - image).norm());
  CHECK(h[found] <= 1.02 * peak + 0.01 / (4 * std::numbers::pi * (mic - room.source).norm()));
}

TEST_CASE("single-microphone grid equals simulate_rir") {
  RoomSpec room;
  UlaSpec ula;
  ula.m = 1;
  const RirGrid g = simulate_grid(room, ula, 100);
  REQUIRE(g.data.cols() == 1);
  CHECK(g.data.col(0) == simulate_rir(room, ula.position(0), 100));
  CHECK(g.fs == room.fs);
  CHECK(g.d == ula.d);
  CHECK(g.geometry.x_a == ula.x_a);
  CHECK(g.geometry.y_0 == ula.y_0);
}

TEST_CASE("grid columns follow microphone relabelling") {
  RoomSpec room;
  UlaSpec ula;
  ula.m = 12;
  const RirGrid g = simulate_grid(room, ula, 120);
  std::vector<Eigen::Index> order(12);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(4));
  for (Eigen::Index m : order) CHECK(simulate_rir(room, ula.position(m), 120) == g.data.col(m));
  CHECK(simulate_grid(room, ula, 120).data == g.data);
}

TEST_CASE("direct-path moveout across the canonical array") {
  const RoomSpec room;
  const UlaSpec ula;
  const RirGrid g = simulate_grid(room, ula, 160);
  REQUIRE(g.data.rows() == 160);
  REQUIRE(g.data.cols() == 100);
  for (Eigen::Index m = 0; m < 100; ++m) {
    const Vector3d mic = ula.position(m);
    const double expected = room.fs * (mic - room.source).norm() / room.c;
    // Search only up to the earliest first-order wall reflection.
    double first_reflection = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      for (double wall : {0.0, room.dims[a]}) {
        Vector3d image = room.source;
        image[a] = 2.0 * wall - image[a];
        first_reflection = std::min(first_reflection, room.fs * (mic - image).norm() / room.c);
      }
    }
    REQUIRE(first_reflection - expected > 3.0);
    const Eigen::Index peak = argmax_in(g.data.col(m), 0, static_cast<Eigen::Index>(first_reflection - 2.0));
    CAPTURE(m);
    CHECK(std::abs(static_cast<double>(peak) - expected) <= 1.0);
  }
}

TEST_CASE("energy grows with the reflection coefficient") {
  const Vector3d mic(4.0, 2.1, 1.5);
  double previous = 0.0;
  for (double b : {0.0, 0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    const Eigen::VectorXd h = simulate_rir(with_betas({b, b, b, b, b, b}), mic, 160);
    const double energy = h.squaredNorm();
    CAPTURE(b);
    CHECK(energy >= previous);
    previous = energy;
  }
}

TEST_CASE("simulator errors") {
  RoomSpec room;
  CHECK_THROWS_AS(simulate_rir(room, room.source, 10), UsageError);
  CHECK_THROWS_AS(simulate_rir(room, Vector3d(7.0, 1.0, 1.0), 10), UsageError);
  CHECK_THROWS_AS(simulate_rir(room, Vector3d(3.0, 1.0, 1.0), 0), UsageError);
  room.t60 = 0.05;
  CHECK_THROWS_AS(simulate_rir(room, Vector3d(3.0, 1.0, 1.0), 10), UsageError);
  RoomSpec outside;
  outside.source = Vector3d(-1.0, 1.0, 1.0);
  CHECK_THROWS_AS(outside.validate(), UsageError);
  CHECK_THROWS_AS(with_betas({1.0, 0, 0, 0, 0, 0}).validate(), UsageError);
  UlaSpec too_long;
  too_long.m = 200;
  CHECK_THROWS_AS(simulate_grid(RoomSpec{}, too_long, 10), UsageError);
}

TEST_CASE("manifest records every field") {
  const auto path = std::filesystem::temp_directory_path() / "rirpinn_test_manifest.txt";
  write_manifest(path, RoomSpec{}, UlaSpec{}, 160, 20);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  for (const char* key : {"room.dims", "room.t60", "room.beta", "room.source", "room.c", "room.fs", "room.samples",
                          "room.max_order", "array.m", "array.d", "array.x_a", "array.z_a", "array.y_0"})
    CHECK(text.str().find(std::string(key) + " = ") != std::string::npos);
  std::filesystem::remove(path);
}
