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
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace rirpinn::diffcore {

// Handle to a node recorded on a Tape.
struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t id = kInvalid;
  bool valid() const { return id != kInvalid; }
};

// Reverse-mode tape over dense matrices.
//
// A node either holds a plain matrix or a *jet stack*: a batch of B points
// carrying second-order directional Taylor coefficients along k input
// directions, laid out as 1 + 2k column blocks of width B:
//
//   [ value | d1(dir 0) | d2(dir 0) | d1(dir 1) | d2(dir 1) | ... ]
//
// affine, add, sub and scale are linear and act on every block. sin, tanh
// and mul propagate the stack with the second-order chain and product
// rules. Because those rules are themselves recorded on the tape, backward
// yields parameter gradients of input second derivatives.
//
// Nodes are appended in evaluation order, so the tape is topologically
// sorted by construction. A tape belongs to one thread.
class Tape {
 public:
  enum class Op {
    kLeaf,
    kSlice,
    kAffine,
    kAdd,
    kSub,
    kScale,
    kMul,
    kSin,
    kTanh,
    kSquare,
    kSum,
    kMean,
    kChannel,
    kSelectColumns,
  };

  // Leaf whose gradient is accumulated by backward().
  Var variable(Eigen::MatrixXd value);
  // Leaf without gradient. `directions` declares a jet stack layout.
  Var constant(Eigen::MatrixXd value, int directions = 0);

  // Reshapes the contiguous segment [offset, offset + rows*cols) of a
  // column vector into a rows x cols matrix (column-major).
  Var slice(Var flat, Eigen::Index offset, Eigen::Index rows, Eigen::Index cols);

  // gain * W * X, applied to every block of a jet stack.
  Var affine(Var weight, Var input, double gain = 1.0);
  // gain * W * X + b; the bias column is added to the value block only.
  Var affine(Var weight, Var input, Var bias, double gain = 1.0);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var a, double factor);
  // Elementwise product; jet stacks use the product rule.
  Var mul(Var a, Var b);
  Var sin(Var a);
  Var tanh(Var a);

  // Reductions and helpers on plain matrices.
  Var square(Var a);
  Var sum(Var a);
  Var mean(Var a);
  // Extracts one column block of a jet stack as a plain matrix.
  Var channel(Var jet, int block);
  Var select_columns(Var a, std::span<const Eigen::Index> columns);

  // Accumulates d(root)/d(node) for every node; root must be 1 x 1.
  void backward(Var root);

  const Eigen::MatrixXd& value(Var v) const;
  double scalar(Var v) const;
  // Gradient of a variable leaf after backward(); zeros if unreached.
  Eigen::MatrixXd gradient(Var v) const;

  int directions(Var v) const;
  // Number of points per block.
  Eigen::Index batch(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  Op op(Var v) const;

  static std::string_view op_name(Op op);

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::size_t in[3] = {Var::kInvalid, Var::kInvalid, Var::kInvalid};
    int directions = 0;
    bool requires_grad = false;
    double factor = 1.0;
    Eigen::Index offset = 0;
    std::vector<Eigen::Index> columns;
    Eigen::MatrixXd value;
    // cos(z) of the value block for sine nodes.
    Eigen::MatrixXd cache;
    Eigen::MatrixXd grad;
  };

  Var push(Node node);
  const Node& node(Var v) const;
  void accumulate(std::size_t id, const Eigen::Ref<const Eigen::MatrixXd>& g);
  void accumulate_owned(std::size_t id, Eigen::MatrixXd&& g);
  Eigen::MatrixXd& grad_buffer(std::size_t id);
  void backward_node(std::size_t id);
  Var activation(Var a, Op op);

  std::vector<Node> nodes_;
};

// f maps a parameter node (a column vector) to a 1 x 1 loss node.
using ScalarFunction = std::function<Var(Tape&, Var params)>;

struct ValueAndGrad {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

// Evaluates f at params and returns the exact reverse-mode gradient.
// Throws NumericalError naming the first operation whose output is not
// finite.
ValueAndGrad value_and_grad(const ScalarFunction& f, const Eigen::VectorXd& params);

// Parameter gradient of a loss that is built from jet stacks (input second
// derivatives). Same machinery as value_and_grad; kept separate because
// callers of the two differ in what f records.
ValueAndGrad grad_of_jet(const ScalarFunction& f, const Eigen::VectorXd& params);

// Builds the jet stack for points (dim x B) along unit directions (one per
// column of `directions`, dim x k): value block = points, d1 block =
// direction repeated B times, d2 block = 0.
Eigen::MatrixXd make_jet_stack(const Eigen::MatrixXd& points, const Eigen::MatrixXd& directions);

}  // namespace rirpinn::diffcore
