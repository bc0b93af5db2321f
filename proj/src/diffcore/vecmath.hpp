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

// Elementwise sin/cos and tanh over contiguous arrays. Uses the glibc
// vector math library when it is available for the target ISA and falls
// back to the scalar libm routines otherwise.

#include <Eigen/Core>

#include <cmath>

#if defined(RIRPINN_HAVE_LIBMVEC) && (defined(__AVX512F__) || defined(__AVX2__))
#include <immintrin.h>
#define RIRPINN_VECMATH 1
extern "C" {
#if defined(__AVX512F__)
__m512d _ZGVeN8v_sin(__m512d);
__m512d _ZGVeN8v_cos(__m512d);
__m512d _ZGVeN8v_tanh(__m512d);
#else
__m256d _ZGVdN4v_sin(__m256d);
__m256d _ZGVdN4v_cos(__m256d);
__m256d _ZGVdN4v_tanh(__m256d);
#endif
}
#endif

namespace rirpinn::diffcore::detail {

inline void sin_cos(const double* x, double* s, double* c, Eigen::Index n) {
  Eigen::Index i = 0;
#if defined(RIRPINN_VECMATH) && defined(__AVX512F__)
  for (; i + 8 <= n; i += 8) {
    const __m512d v = _mm512_loadu_pd(x + i);
    _mm512_storeu_pd(s + i, _ZGVeN8v_sin(v));
    _mm512_storeu_pd(c + i, _ZGVeN8v_cos(v));
  }
#elif defined(RIRPINN_VECMATH)
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(s + i, _ZGVdN4v_sin(v));
    _mm256_storeu_pd(c + i, _ZGVdN4v_cos(v));
  }
#endif
  for (; i < n; ++i) ::sincos(x[i], s + i, c + i);
}

inline void tanh(const double* x, double* t, Eigen::Index n) {
  Eigen::Index i = 0;
#if defined(RIRPINN_VECMATH) && defined(__AVX512F__)
  for (; i + 8 <= n; i += 8) _mm512_storeu_pd(t + i, _ZGVeN8v_tanh(_mm512_loadu_pd(x + i)));
#elif defined(RIRPINN_VECMATH)
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(t + i, _ZGVdN4v_tanh(_mm256_loadu_pd(x + i)));
#endif
  for (; i < n; ++i) t[i] = std::tanh(x[i]);
}

}  // namespace rirpinn::diffcore::detail
