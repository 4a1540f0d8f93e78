#pragma once

#include <vector>

#include "gatenav/numerics/graph.hpp"

namespace gatenav::nn {

// Elementwise; shapes must match exactly.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, float s);
Var add_scalar(const Var& a, float s);

// Activations.
Var relu(const Var& x);
Var leaky_relu(const Var& x, float slope = 0.01f);
Var tanh_act(const Var& x);
Var sigmoid(const Var& x);
Var exp_op(const Var& x);
Var clamp(const Var& x, float lo, float hi);

// x[B x I] * w[I x O] + b[O]
Var dense(const Var& x, const Var& w, const Var& b);
Var matmul(const Var& a, const Var& b);

// x[B x C x H x W], kernel[F x C x k x k] -> [B x F x H' x W']
Var conv2d(const Var& x, const Var& kernel, int stride, int pad);
// x[B x C x H x W], kernel[C x F x k x k] -> [B x F x H' x W'],
// H' = (H-1)*stride - 2*pad + k. Forward is the adjoint of conv2d.
Var transpose_conv2d(const Var& x, const Var& kernel, int stride, int pad);

// Reductions to scalar.
Var sum(const Var& x);
Var mean(const Var& x);
// mean((a-b)^2) over all elements.
Var mse(const Var& a, const Var& b);

// x[B x D] -> [B x len], columns [start, start+len).
Var slice_cols(const Var& x, int start, int len);
// Horizontal concat of [B x d_i] blocks.
Var concat_cols(const std::vector<Var>& parts);
Var reshape(const Var& x, std::vector<int> shape);

}  // namespace gatenav::nn
