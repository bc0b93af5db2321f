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

#include "rirpinn/diffcore/tape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "rirpinn/diffcore/parallel.hpp"
#include "rirpinn/errors.hpp"
#include "vecmath.hpp"

namespace rirpinn::diffcore {

using Eigen::Index;
using Eigen::MatrixXd;

namespace {

Index block_width(const MatrixXd& m, int directions) { return m.cols() / (1 + 2 * directions); }

}  // namespace

std::string_view Tape::op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kSlice: return "slice";
    case Op::kAffine: return "affine";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kScale: return "scale";
    case Op::kMul: return "mul";
    case Op::kSin: return "sin";
    case Op::kTanh: return "tanh";
    case Op::kSquare: return "square";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kChannel: return "channel";
    case Op::kSelectColumns: return "select_columns";
  }
  return "unknown";
}

Var Tape::push(Node n) {
  if (!n.value.allFinite()) {
    std::ostringstream msg;
    msg << "tape operation #" << nodes_.size() << " (" << op_name(n.op)
        << ") produced a non-finite value";
    throw NumericalError(msg.str());
  }
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw UsageError("tape: invalid variable handle");
  return nodes_[v.id];
}

Var Tape::variable(MatrixXd value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::constant(MatrixXd value, int directions) {
  if (directions < 0 || value.cols() % (1 + 2 * directions) != 0)
    throw UsageError("tape: column count does not match the jet layout");
  Node n;
  n.value = std::move(value);
  n.directions = directions;
  return push(std::move(n));
}

Var Tape::slice(Var flat, Index offset, Index rows, Index cols) {
  const Node& src = node(flat);
  if (src.value.cols() != 1 || offset < 0 || offset + rows * cols > src.value.rows())
    throw UsageError("tape: slice out of range");
  Node n;
  n.op = Op::kSlice;
  n.in[0] = flat.id;
  n.offset = offset;
  n.requires_grad = src.requires_grad;
  n.value = Eigen::Map<const MatrixXd>(src.value.data() + offset, rows, cols);
  return push(std::move(n));
}

Var Tape::affine(Var weight, Var input, double gain) { return affine(weight, input, Var{}, gain); }

Var Tape::affine(Var weight, Var input, Var bias, double gain) {
  const Node& w = node(weight);
  const Node& x = node(input);
  if (w.directions != 0) throw UsageError("tape: affine weight must be a plain matrix");
  if (w.value.cols() != x.value.rows()) throw DataError("tape: affine shape mismatch");
  Node n;
  n.op = Op::kAffine;
  n.in[0] = weight.id;
  n.in[1] = input.id;
  n.factor = gain;
  n.directions = x.directions;
  n.requires_grad = w.requires_grad || x.requires_grad;
  // Block by block, so the value block is computed identically whatever
  // the number of jet directions riding along with it.
  const Index B = block_width(x.value, x.directions);
  n.value.resize(w.value.rows(), x.value.cols());
  for (int k = 0; k < 1 + 2 * x.directions; ++k)
    gemm(gain, w.value, x.value.middleCols(k * B, B), n.value.middleCols(k * B, B));
  if (bias.valid()) {
    const Node& b = node(bias);
    if (b.value.rows() != w.value.rows() || b.value.cols() != 1)
      throw DataError("tape: affine bias shape mismatch");
    n.in[2] = bias.id;
    n.requires_grad = n.requires_grad || b.requires_grad;
    n.value.leftCols(B).colwise() += b.value.col(0);
  }
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  if (x.value.rows() != y.value.rows() || x.value.cols() != y.value.cols() ||
      x.directions != y.directions)
    throw DataError("tape: add shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.in[0] = a.id;
  n.in[1] = b.id;
  n.directions = x.directions;
  n.requires_grad = x.requires_grad || y.requires_grad;
  n.value = x.value + y.value;
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  if (x.value.rows() != y.value.rows() || x.value.cols() != y.value.cols() ||
      x.directions != y.directions)
    throw DataError("tape: sub shape mismatch");
  Node n;
  n.op = Op::kSub;
  n.in[0] = a.id;
  n.in[1] = b.id;
  n.directions = x.directions;
  n.requires_grad = x.requires_grad || y.requires_grad;
  n.value = x.value - y.value;
  return push(std::move(n));
}

Var Tape::scale(Var a, double factor) {
  const Node& x = node(a);
  Node n;
  n.op = Op::kScale;
  n.in[0] = a.id;
  n.factor = factor;
  n.directions = x.directions;
  n.requires_grad = x.requires_grad;
  n.value = factor * x.value;
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  if (x.value.rows() != y.value.rows() || x.value.cols() != y.value.cols() ||
      x.directions != y.directions)
    throw DataError("tape: mul shape mismatch");
  Node n;
  n.op = Op::kMul;
  n.in[0] = a.id;
  n.in[1] = b.id;
  n.directions = x.directions;
  n.requires_grad = x.requires_grad || y.requires_grad;
  const Index B = block_width(x.value, x.directions);
  auto u = [&](int k) { return x.value.middleCols(k * B, B).array(); };
  auto v = [&](int k) { return y.value.middleCols(k * B, B).array(); };
  n.value.resize(x.value.rows(), x.value.cols());
  n.value.leftCols(B).array() = u(0) * v(0);
  for (int d = 0; d < x.directions; ++d) {
    const int k1 = 1 + 2 * d, k2 = 2 + 2 * d;
    n.value.middleCols(k1 * B, B).array() = u(k1) * v(0) + u(0) * v(k1);
    n.value.middleCols(k2 * B, B).array() = u(k2) * v(0) + 2.0 * u(k1) * v(k1) + u(0) * v(k2);
  }
  return push(std::move(n));
}

Var Tape::activation(Var a, Op op) {
  const Node& x = node(a);
  Node n;
  n.op = op;
  n.in[0] = a.id;
  n.directions = x.directions;
  n.requires_grad = x.requires_grad;
  const Index rows = x.value.rows();
  const Index B = block_width(x.value, x.directions);
  const int dirs = x.directions;
  n.value.resize(rows, x.value.cols());
  if (op == Op::kSin) n.cache.resize(rows, B);

  // One pass per column: the activation and its first two derivatives on
  // the value entry, then the jet blocks of that column.
  const std::size_t shards = static_cast<std::size_t>((B + kShardColumns - 1) / kShardColumns);
  parallel_for(shards, [&](std::size_t shard) {
    Eigen::ArrayXd s1(rows), s2(rows);
    const Index begin = static_cast<Index>(shard) * kShardColumns;
    const Index end = std::min(B, begin + kShardColumns);
    for (Index j = begin; j < end; ++j) {
      const double* z0 = x.value.col(j).data();
      double* a0 = n.value.col(j).data();
      if (op == Op::kSin) {
        detail::sin_cos(z0, a0, n.cache.col(j).data(), rows);
        s1 = n.cache.col(j).array();
        s2 = -n.value.col(j).array();
      } else {
        detail::tanh(z0, a0, rows);
        s1 = 1.0 - n.value.col(j).array().square();
        s2 = -2.0 * n.value.col(j).array() * s1;
      }
      for (int d = 0; d < dirs; ++d) {
        const Index c1 = (1 + 2 * d) * B + j, c2 = (2 + 2 * d) * B + j;
        const auto z1 = x.value.col(c1).array();
        const auto z2 = x.value.col(c2).array();
        n.value.col(c1).array() = s1 * z1;
        n.value.col(c2).array() = s1 * z2 + s2 * z1.square();
      }
    }
  });
  return push(std::move(n));
}

Var Tape::sin(Var a) { return activation(a, Op::kSin); }
Var Tape::tanh(Var a) { return activation(a, Op::kTanh); }

Var Tape::square(Var a) {
  const Node& x = node(a);
  if (x.directions != 0) throw UsageError("tape: square expects a plain matrix; use mul for jets");
  Node n;
  n.op = Op::kSquare;
  n.in[0] = a.id;
  n.requires_grad = x.requires_grad;
  n.value = x.value.array().square().matrix();
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  const Node& x = node(a);
  if (x.directions != 0) throw UsageError("tape: sum expects a plain matrix");
  Node n;
  n.op = Op::kSum;
  n.in[0] = a.id;
  n.requires_grad = x.requires_grad;
  n.value = MatrixXd::Constant(1, 1, x.value.sum());
  return push(std::move(n));
}

Var Tape::mean(Var a) {
  const Node& x = node(a);
  if (x.directions != 0) throw UsageError("tape: mean expects a plain matrix");
  if (x.value.size() == 0) throw DataError("tape: mean of an empty matrix");
  Node n;
  n.op = Op::kMean;
  n.in[0] = a.id;
  n.requires_grad = x.requires_grad;
  n.value = MatrixXd::Constant(1, 1, x.value.sum() / static_cast<double>(x.value.size()));
  return push(std::move(n));
}

Var Tape::channel(Var jet, int block) {
  const Node& x = node(jet);
  if (block < 0 || block > 2 * x.directions) throw UsageError("tape: channel index out of range");
  const Index B = block_width(x.value, x.directions);
  Node n;
  n.op = Op::kChannel;
  n.in[0] = jet.id;
  n.offset = block;
  n.requires_grad = x.requires_grad;
  n.value = x.value.middleCols(block * B, B);
  return push(std::move(n));
}

Var Tape::select_columns(Var a, std::span<const Index> columns) {
  const Node& x = node(a);
  if (x.directions != 0) throw UsageError("tape: select_columns expects a plain matrix");
  Node n;
  n.op = Op::kSelectColumns;
  n.in[0] = a.id;
  n.requires_grad = x.requires_grad;
  n.columns.assign(columns.begin(), columns.end());
  n.value.resize(x.value.rows(), static_cast<Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] < 0 || columns[i] >= x.value.cols())
      throw DataError("tape: selected column out of range");
    n.value.col(static_cast<Index>(i)) = x.value.col(columns[i]);
  }
  return push(std::move(n));
}

MatrixXd& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad.setZero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(std::size_t id, const Eigen::Ref<const MatrixXd>& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::accumulate_owned(std::size_t id, MatrixXd&& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = std::move(g);
  } else {
    n.grad += g;
  }
}

void Tape::backward(Var root) {
  const Node& r = node(root);
  if (r.value.rows() != 1 || r.value.cols() != 1)
    throw UsageError("tape: backward requires a 1 x 1 root");
  for (auto& n : nodes_) {
    if (n.op != Op::kLeaf) n.grad.resize(0, 0);
    else if (n.grad.size() != 0) n.grad.setZero();
  }
  grad_buffer(root.id).setConstant(1.0);
  for (std::size_t id = root.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.op == Op::kLeaf || n.grad.size() == 0 || !n.requires_grad) continue;
    backward_node(id);
    n.grad.resize(0, 0);
  }
}

void Tape::backward_node(std::size_t id) {
  const Node& n = nodes_[id];
  const MatrixXd& g = n.grad;
  switch (n.op) {
    case Op::kLeaf:
      break;
    case Op::kSlice: {
      if (!nodes_[n.in[0]].requires_grad) break;
      MatrixXd& flat = grad_buffer(n.in[0]);
      flat.col(0).segment(n.offset, g.size()) += Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
      break;
    }
    case Op::kAffine: {
      const Node& w = nodes_[n.in[0]];
      const Node& x = nodes_[n.in[1]];
      MatrixXd tmp;
      if (x.requires_grad) {
        tmp.resize(w.value.cols(), g.cols());
        gemm_tn(n.factor, w.value, g, tmp);
        accumulate_owned(n.in[1], std::move(tmp));
      }
      if (w.requires_grad) {
        MatrixXd gw;
        gemm_nt(n.factor, g, x.value, gw);
        accumulate_owned(n.in[0], std::move(gw));
      }
      if (n.in[2] != Var::kInvalid && nodes_[n.in[2]].requires_grad) {
        const Index B = block_width(g, n.directions);
        accumulate(n.in[2], g.leftCols(B).rowwise().sum());
      }
      break;
    }
    case Op::kAdd:
      accumulate(n.in[0], g);
      accumulate(n.in[1], g);
      break;
    case Op::kSub:
      accumulate(n.in[0], g);
      accumulate(n.in[1], -g);
      break;
    case Op::kScale:
      accumulate(n.in[0], n.factor * g);
      break;
    case Op::kMul: {
      const Index B = block_width(g, n.directions);
      for (int side = 0; side < 2; ++side) {
        const std::size_t self = n.in[side];
        if (!nodes_[self].requires_grad) continue;
        const MatrixXd& other = nodes_[n.in[1 - side]].value;
        auto o = [&](int k) { return other.middleCols(k * B, B).array(); };
        auto gk = [&](int k) { return g.middleCols(k * B, B).array(); };
        MatrixXd gs(g.rows(), g.cols());
        gs.leftCols(B).array() = gk(0) * o(0);
        for (int d = 0; d < n.directions; ++d) {
          const int k1 = 1 + 2 * d, k2 = 2 + 2 * d;
          gs.leftCols(B).array() += gk(k1) * o(k1) + gk(k2) * o(k2);
          gs.middleCols(k1 * B, B).array() = gk(k1) * o(0) + 2.0 * gk(k2) * o(k1);
          gs.middleCols(k2 * B, B).array() = gk(k2) * o(0);
        }
        accumulate_owned(self, std::move(gs));
      }
      break;
    }
    case Op::kSin:
    case Op::kTanh: {
      const Node& x = nodes_[n.in[0]];
      const Index rows = g.rows();
      const Index B = block_width(g, n.directions);
      const int dirs = n.directions;
      const bool is_sin = n.op == Op::kSin;
      MatrixXd gz(rows, g.cols());
      const std::size_t shards = static_cast<std::size_t>((B + kShardColumns - 1) / kShardColumns);
      parallel_for(shards, [&](std::size_t shard) {
        // Derivatives of the activation up to third order on the value entry.
        Eigen::ArrayXd s1(rows), s2(rows), s3(rows);
        const Index begin = static_cast<Index>(shard) * kShardColumns;
        const Index end = std::min(B, begin + kShardColumns);
        for (Index j = begin; j < end; ++j) {
          const auto a0 = n.value.col(j).array();
          if (is_sin) {
            s1 = n.cache.col(j).array();
            s2 = -a0;
            s3 = -s1;
          } else {
            s1 = 1.0 - a0.square();
            s2 = -2.0 * a0 * s1;
            s3 = -2.0 * s1.square() + 4.0 * a0.square() * s1;
          }
          auto gz0 = gz.col(j).array();
          gz0 = g.col(j).array() * s1;
          for (int d = 0; d < dirs; ++d) {
            const Index c1 = (1 + 2 * d) * B + j, c2 = (2 + 2 * d) * B + j;
            const auto z1 = x.value.col(c1).array();
            const auto z2 = x.value.col(c2).array();
            const auto g1 = g.col(c1).array();
            const auto g2 = g.col(c2).array();
            gz0 += g1 * s2 * z1 + g2 * (s2 * z2 + s3 * z1.square());
            gz.col(c1).array() = g1 * s1 + 2.0 * g2 * s2 * z1;
            gz.col(c2).array() = g2 * s1;
          }
        }
      });
      accumulate_owned(n.in[0], std::move(gz));
      break;
    }
    case Op::kSquare:
      accumulate(n.in[0], 2.0 * nodes_[n.in[0]].value.cwiseProduct(g));
      break;
    case Op::kSum: {
      const MatrixXd& x = nodes_[n.in[0]].value;
      accumulate(n.in[0], MatrixXd::Constant(x.rows(), x.cols(), g(0, 0)));
      break;
    }
    case Op::kMean: {
      const MatrixXd& x = nodes_[n.in[0]].value;
      accumulate(n.in[0], MatrixXd::Constant(x.rows(), x.cols(), g(0, 0) / static_cast<double>(x.size())));
      break;
    }
    case Op::kChannel: {
      if (!nodes_[n.in[0]].requires_grad) break;
      MatrixXd& dst = grad_buffer(n.in[0]);
      dst.middleCols(n.offset * g.cols(), g.cols()) += g;
      break;
    }
    case Op::kSelectColumns: {
      if (!nodes_[n.in[0]].requires_grad) break;
      MatrixXd& dst = grad_buffer(n.in[0]);
      for (std::size_t i = 0; i < n.columns.size(); ++i)
        dst.col(n.columns[i]) += g.col(static_cast<Index>(i));
      break;
    }
  }
}

const MatrixXd& Tape::value(Var v) const { return node(v).value; }

double Tape::scalar(Var v) const {
  const MatrixXd& m = node(v).value;
  if (m.size() != 1) throw UsageError("tape: scalar() on a non 1 x 1 node");
  return m(0, 0);
}

MatrixXd Tape::gradient(Var v) const {
  const Node& n = node(v);
  if (n.op != Op::kLeaf || !n.requires_grad) throw UsageError("tape: gradient() is defined for variables only");
  if (n.grad.size() == 0) return MatrixXd::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

int Tape::directions(Var v) const { return node(v).directions; }

Index Tape::batch(Var v) const {
  const Node& n = node(v);
  return block_width(n.value, n.directions);
}

Tape::Op Tape::op(Var v) const { return node(v).op; }

ValueAndGrad value_and_grad(const ScalarFunction& f, const Eigen::VectorXd& params) {
  Tape tape;
  const Var p = tape.variable(params);
  const Var loss = f(tape, p);
  tape.backward(loss);
  return {tape.scalar(loss), tape.gradient(p).col(0)};
}

ValueAndGrad grad_of_jet(const ScalarFunction& f, const Eigen::VectorXd& params) {
  return value_and_grad(f, params);
}

MatrixXd make_jet_stack(const MatrixXd& points, const MatrixXd& directions) {
  if (points.rows() != directions.rows()) throw DataError("jet stack: dimension mismatch");
  const Index B = points.cols();
  const Index k = directions.cols();
  MatrixXd stack = MatrixXd::Zero(points.rows(), (1 + 2 * k) * B);
  stack.leftCols(B) = points;
  for (Index d = 0; d < k; ++d) {
    if (directions.col(d).norm() == 0.0) throw UsageError("jet stack: zero-length direction");
    stack.middleCols((1 + 2 * d) * B, B).colwise() = directions.col(d);
  }
  return stack;
}

}  // namespace rirpinn::diffcore
