#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dhg/tensor.hpp"

namespace dhg {

struct Parameter;

// Non-linearity applied elementwise. Identity is an internal extension used
// by tests and by aggregation roots that skip the activation.
class Activation {
 public:
  enum class Kind { Identity, Tanh, Relu, LeakyRelu };

  static Activation identity() { return Activation(Kind::Identity, 0.0); }
  static Activation tanh() { return Activation(Kind::Tanh, 0.0); }
  static Activation relu() { return Activation(Kind::Relu, 0.0); }
  static Activation leaky_relu(double slope);

  Kind kind() const { return kind_; }
  double slope() const { return slope_; }

  double apply(double x) const;
  // Derivative given the input x and the already-computed output fx.
  double grad(double x, double fx) const;

  std::string name() const;
  static Activation parse(const std::string& name);

 private:
  Activation(Kind kind, double slope) : kind_(kind), slope_(slope) {}
  Kind kind_;
  double slope_;
};

// Reverse-mode autodiff over an operation tape. Each recorded node stores its
// forward value, the ids of its inputs and a closure that routes the output
// gradient to them. Nodes are appended in execution order, so input ids always
// precede the node; the backward pass walks ids in exact reverse order.
class Tape {
 public:
  struct Val {
    int32_t id = -1;
    bool valid() const { return id >= 0; }
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves
  Val constant(Tensor t);
  Val param(Parameter& p);  // gradient is accumulated into p.grad by backward()

  // Ops
  Val matmul(Val a, Val b);
  Val add(Val a, Val b);
  Val add_n(std::span<const Val> terms);  // elementwise sum of equal shapes
  Val mul(Val a, Val b);                  // hadamard
  Val scale(Val a, double c);
  Val activate(Val a, Activation act);
  Val concat_cols(std::span<const Val> parts);  // row vectors -> 1 x sum(d_i)
  Val stack_rows(std::span<const Val> parts);   // 1 x d rows  -> n x d
  Val softmax_row(Val logits);                  // 1 x n, max-subtracted
  Val nll_logsoftmax(Val logits, int64_t label);  // 1 x C -> 1 x 1
  Val sum(Val a);  // 1 x 1

  const Tensor& value(Val v) const { return nodes_[static_cast<size_t>(v.id)].value; }
  // Gradient of the last backward() target w.r.t. node v (zero tensor if v was
  // not reached).
  const Tensor& grad(Val v) const;

  void backward(Val loss);

  size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // allocated lazily during backward
    Parameter* param = nullptr;
    std::vector<int32_t> inputs;
    std::function<void(Tape&, Node&)> back;  // empty for leaves
  };

  Val push(Tensor value, std::vector<int32_t> inputs, std::function<void(Tape&, Node&)> back);
  Node& node(int32_t id) { return nodes_[static_cast<size_t>(id)]; }
  Tensor& grad_of(int32_t id) { return nodes_[static_cast<size_t>(id)].grad; }
  void check(Val v) const;

  std::vector<Node> nodes_;
  Tensor empty_grad_;
};

}  // namespace dhg
