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

#include "rirpinn/diffcore/parallel.hpp"

#include <algorithm>
#if defined(__GLIBC__)
#include <malloc.h>
#endif
#include <atomic>
#include <thread>
#include <vector>

namespace rirpinn::diffcore {

namespace {

std::atomic<unsigned> g_threads{1};

std::size_t shard_count(Eigen::Index columns) {
  return static_cast<std::size_t>((columns + kShardColumns - 1) / kShardColumns);
}

Eigen::Index shard_begin(std::size_t shard) {
  return static_cast<Eigen::Index>(shard) * kShardColumns;
}

Eigen::Index shard_width(std::size_t shard, Eigen::Index columns) {
  return std::min(kShardColumns, columns - shard_begin(shard));
}

}  // namespace

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 32 * 1024 * 1024);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

void set_thread_count(unsigned count) {
  if (count == 0) count = std::max(1u, std::thread::hardware_concurrency());
  g_threads.store(count);
}

unsigned thread_count() { return g_threads.load(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
}

void gemm(double alpha, const Eigen::Ref<const Eigen::MatrixXd>& lhs,
          const Eigen::Ref<const Eigen::MatrixXd>& rhs, Eigen::Ref<Eigen::MatrixXd> out) {
  const Eigen::Index n = rhs.cols();
  parallel_for(shard_count(n), [&](std::size_t s) {
    const Eigen::Index c0 = shard_begin(s), w = shard_width(s, n);
    out.middleCols(c0, w).noalias() = alpha * (lhs * rhs.middleCols(c0, w));
  });
}

void gemm_tn(double alpha, const Eigen::Ref<const Eigen::MatrixXd>& lhs,
             const Eigen::Ref<const Eigen::MatrixXd>& rhs, Eigen::Ref<Eigen::MatrixXd> out) {
  const Eigen::Index n = rhs.cols();
  parallel_for(shard_count(n), [&](std::size_t s) {
    const Eigen::Index c0 = shard_begin(s), w = shard_width(s, n);
    out.middleCols(c0, w).noalias() = alpha * (lhs.transpose() * rhs.middleCols(c0, w));
  });
}

void gemm_nt(double alpha, const Eigen::Ref<const Eigen::MatrixXd>& lhs,
             const Eigen::Ref<const Eigen::MatrixXd>& rhs, Eigen::MatrixXd& out) {
  const Eigen::Index n = lhs.cols();
  const std::size_t shards = shard_count(n);
  std::vector<Eigen::MatrixXd> partial(shards);
  parallel_for(shards, [&](std::size_t s) {
    const Eigen::Index c0 = shard_begin(s), w = shard_width(s, n);
    partial[s].noalias() = lhs.middleCols(c0, w) * rhs.middleCols(c0, w).transpose();
  });
  out.setZero(lhs.rows(), rhs.rows());
  for (const auto& p : partial) out += p;
  out *= alpha;
}

}  // namespace rirpinn::diffcore
