#include "gatenav/numerics/graph.hpp"

#include <unordered_set>

#include "gatenav/common/error.hpp"

namespace gatenav::nn {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }
void set_grad_enabled(bool on) { g_grad_enabled = on; }

Var Var::constant(Tensor value, std::string name) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->op = std::move(name);
  return Var(std::move(node));
}

Var Var::parameter(Tensor value, std::string name) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  node->needs_grad = true;
  node->op = std::move(name);
  return Var(std::move(node));
}

float Var::item() const {
  if (node_->value.size() != 1) throw NumericsError("item() on non-scalar tensor " + shape_str(shape()));
  return node_->value.at(0);
}

Var make_op(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backward_fn, std::string op_name) {
  value.check_finite(op_name);
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->op = std::move(op_name);
  if (g_grad_enabled) {
    bool needs = false;
    for (const auto& in : inputs) needs = needs || in.node()->needs_grad;
    if (needs) {
      node->needs_grad = true;
      node->parents.reserve(inputs.size());
      for (auto& in : inputs) node->parents.push_back(in.node_ptr());
      node->backward_fn = std::move(backward_fn);
    }
  }
  return Var(std::move(node));
}

void backward(const Var& loss) {
  if (!loss.defined()) throw NumericsError("backward on undefined Var");
  if (loss.value().size() != 1) throw NumericsError("backward requires a scalar loss, got " + shape_str(loss.shape()));

  // Iterative post-order DFS; ordering is a function of graph structure only,
  // so repeated runs accumulate gradients in an identical order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  visited.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (!node->needs_grad) {
      stack.pop_back();
      continue;
    }
    if (next_child < node->parents.size()) {
      Node* child = node->parents[next_child++].get();
      if (child->needs_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  if (order.empty()) return;  // loss does not depend on any parameter

  for (Node* n : order) n->value.alloc_grad();
  loss.node()->value.grad()[0] = 1.0f;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn) {
      for (auto& p : n->parents) {
        if (p->needs_grad) p->value.alloc_grad();
      }
      n->backward_fn(*n);
    }
  }
  for (Node* n : order) n->value.check_finite("backward(" + n->op + ")");
}

}  // namespace gatenav::nn
