#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gatenav/numerics/tensor.hpp"

namespace gatenav::nn {

// One node of the recorded computation. backward_fn reads this node's
// gradient and accumulates into the parents' gradients.
struct Node {
  Tensor value;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;
  bool requires_grad = false;  // leaf parameter
  bool needs_grad = false;     // reachable from a parameter
  std::string op;
};

// Shared handle to a graph node. Copies alias the same node.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  // Leaf constructors.
  static Var constant(Tensor value, std::string name = "const");
  static Var parameter(Tensor value, std::string name = "param");

  bool defined() const { return node_ != nullptr; }
  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& node_ptr() const { return node_; }

  Tensor& value() { return node_->value; }
  const Tensor& value() const { return node_->value; }
  const std::vector<int>& shape() const { return node_->value.shape(); }

  // Scalar convenience; node value must have exactly one element.
  float item() const;

 private:
  std::shared_ptr<Node> node_;
};

// When disabled, ops still compute values but record no backward closures.
bool grad_enabled();
void set_grad_enabled(bool on);

struct NoGradGuard {
  NoGradGuard() : prev_(grad_enabled()) { set_grad_enabled(false); }
  ~NoGradGuard() { set_grad_enabled(prev_); }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

// Reverse-mode sweep from a scalar loss. Populates grad buffers of every
// node that needs one; fan-out contributions are summed.
void backward(const Var& loss);

// Internal helper for op implementations.
Var make_op(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backward_fn, std::string op_name);

}  // namespace gatenav::nn
