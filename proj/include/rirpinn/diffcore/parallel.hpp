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

#include <Eigen/Core>

#include <cstddef>
#include <functional>

namespace rirpinn::diffcore {

// Column count of one work unit. Shard boundaries depend only on this
// constant, never on the number of threads, so every reduction below sums
// its partial results in the same order on every machine.
inline constexpr Eigen::Index kShardColumns = 1024;

// Number of worker threads used by the sharded kernels. 0 selects
// std::thread::hardware_concurrency().
void set_thread_count(unsigned count);
unsigned thread_count();

// Keeps large matrix buffers on the heap between training iterations
// instead of returning them to the kernel after every free. Call once at
// program start; a no-op where the allocator has no such knob.
void tune_allocator();

// Calls fn(i) for every i in [0, count), distributing calls over the
// configured threads. fn must not depend on which thread runs it.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// out = alpha * lhs * rhs; out must already have the product's shape.
void gemm(double alpha, const Eigen::Ref<const Eigen::MatrixXd>& lhs,
          const Eigen::Ref<const Eigen::MatrixXd>& rhs, Eigen::Ref<Eigen::MatrixXd> out);

// out = alpha * lhs^T * rhs; out must already have the product's shape.
void gemm_tn(double alpha, const Eigen::Ref<const Eigen::MatrixXd>& lhs,
             const Eigen::Ref<const Eigen::MatrixXd>& rhs, Eigen::Ref<Eigen::MatrixXd> out);

// out = alpha * lhs * rhs^T. The reduction runs over the shared column
// dimension; per-shard partial products are summed in shard order.
void gemm_nt(double alpha, const Eigen::Ref<const Eigen::MatrixXd>& lhs,
             const Eigen::Ref<const Eigen::MatrixXd>& rhs, Eigen::MatrixXd& out);

}  // namespace rirpinn::diffcore
