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

#include <cmath>
#include <span>
#include <vector>

#include "rirpinn/errors.hpp"

namespace rirpinn::diffcore {

// Second-order directional Taylor coefficients of a scalar: value, first
// and second derivative along one input direction.
template <typename Scalar>
struct Jet2 {
  Scalar value{};
  Scalar d1{};
  Scalar d2{};

  static Jet2 constant(Scalar v) { return {v, Scalar(0), Scalar(0)}; }
};

template <typename Scalar>
Jet2<Scalar> operator+(const Jet2<Scalar>& a, const Jet2<Scalar>& b) {
  return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
}

template <typename Scalar>
Jet2<Scalar> operator-(const Jet2<Scalar>& a, const Jet2<Scalar>& b) {
  return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2};
}

template <typename Scalar>
Jet2<Scalar> operator-(const Jet2<Scalar>& a) {
  return {-a.value, -a.d1, -a.d2};
}

template <typename Scalar>
Jet2<Scalar> operator*(const Jet2<Scalar>& a, const Jet2<Scalar>& b) {
  return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
          a.d2 * b.value + Scalar(2) * a.d1 * b.d1 + a.value * b.d2};
}

template <typename Scalar>
Jet2<Scalar> operator*(Scalar s, const Jet2<Scalar>& a) {
  return {s * a.value, s * a.d1, s * a.d2};
}

template <typename Scalar>
Jet2<Scalar> operator+(const Jet2<Scalar>& a, Scalar s) {
  return {a.value + s, a.d1, a.d2};
}

// Composition with a scalar function g given g(v), g'(v), g''(v).
template <typename Scalar>
Jet2<Scalar> compose(const Jet2<Scalar>& a, Scalar g0, Scalar g1, Scalar g2) {
  return {g0, g1 * a.d1, g1 * a.d2 + g2 * a.d1 * a.d1};
}

template <typename Scalar>
Jet2<Scalar> sin(const Jet2<Scalar>& a) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(a.value), c = cos(a.value);
  return compose(a, s, c, -s);
}

template <typename Scalar>
Jet2<Scalar> cos(const Jet2<Scalar>& a) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(a.value), c = cos(a.value);
  return compose(a, c, -s, -c);
}

template <typename Scalar>
Jet2<Scalar> tanh(const Jet2<Scalar>& a) {
  using std::tanh;
  const Scalar t = tanh(a.value);
  const Scalar p = Scalar(1) - t * t;
  return compose(a, t, p, Scalar(-2) * t * p);
}

template <typename Scalar>
Jet2<Scalar> exp(const Jet2<Scalar>& a) {
  using std::exp;
  const Scalar e = exp(a.value);
  return compose(a, e, e, e);
}

// Evaluates f at x and returns its value with the first and second
// directional derivatives along the unit vector dir. f receives one jet per
// input coordinate and must be written against the Jet2 operators.
template <typename Scalar, typename F>
Jet2<Scalar> jet2_eval(F&& f, std::span<const Scalar> x, std::span<const Scalar> dir) {
  if (x.size() != dir.size()) throw UsageError("jet2_eval: direction has the wrong dimension");
  Scalar norm2(0);
  for (const Scalar& v : dir) norm2 += v * v;
  if (norm2 == Scalar(0)) throw UsageError("jet2_eval: zero-length direction");
  using std::abs;
  using std::sqrt;
  if (abs(sqrt(norm2) - Scalar(1)) > Scalar(1e-12)) throw UsageError("jet2_eval: direction must be a unit vector");
  std::vector<Jet2<Scalar>> seeds(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) seeds[i] = {x[i], dir[i], Scalar(0)};
  return f(std::span<const Jet2<Scalar>>(seeds));
}

}  // namespace rirpinn::diffcore
