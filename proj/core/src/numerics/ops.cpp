#include "gatenav/numerics/ops.hpp"

#include <cmath>
#include <cstring>

#include "gatenav/common/error.hpp"
#include "gemm.hpp"

namespace gatenav::nn {

using detail::ConvGeom;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  require(a.value().same_shape(b.value()),
          std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

// Elementwise binary op with per-element partials captured as lambdas.
template <typename Fwd, typename Bwd>
Var elementwise2(const Var& a, const Var& b, const char* name, Fwd fwd, Bwd bwd) {
  require_same_shape(a, b, name);
  Tensor out(a.shape());
  const int64_t n = out.size();
  const float* pa = a.value().data();
  const float* pb = b.value().data();
  float* po = out.data();
  for (int64_t i = 0; i < n; ++i) po[i] = fwd(pa[i], pb[i]);
  return make_op(
      std::move(out), {a, b},
      [bwd](Node& self) {
        const int64_t n = self.value.size();
        const float* g = self.value.grad();
        Node* na = self.parents[0].get();
        Node* nb = self.parents[1].get();
        const float* pa = na->value.data();
        const float* pb = nb->value.data();
        float* ga = na->needs_grad ? na->value.grad() : nullptr;
        float* gb = nb->needs_grad ? nb->value.grad() : nullptr;
        for (int64_t i = 0; i < n; ++i) {
          auto [da, db] = bwd(pa[i], pb[i]);
          if (ga) ga[i] += g[i] * da;
          if (gb) gb[i] += g[i] * db;
        }
      },
      name);
}

template <typename Fwd, typename Bwd>
Var elementwise1(const Var& x, const char* name, Fwd fwd, Bwd bwd) {
  Tensor out(x.shape());
  const int64_t n = out.size();
  const float* px = x.value().data();
  float* po = out.data();
  for (int64_t i = 0; i < n; ++i) po[i] = fwd(px[i]);
  return make_op(
      std::move(out), {x},
      [bwd](Node& self) {
        const int64_t n = self.value.size();
        const float* g = self.value.grad();
        Node* nx = self.parents[0].get();
        const float* px = nx->value.data();
        const float* py = self.value.data();
        float* gx = nx->value.grad();
        for (int64_t i = 0; i < n; ++i) gx[i] += g[i] * bwd(px[i], py[i]);
      },
      name);
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return elementwise2(a, b, "add", [](float x, float y) { return x + y; },
                      [](float, float) { return std::pair<float, float>{1.0f, 1.0f}; });
}

Var sub(const Var& a, const Var& b) {
  return elementwise2(a, b, "sub", [](float x, float y) { return x - y; },
                      [](float, float) { return std::pair<float, float>{1.0f, -1.0f}; });
}

Var mul(const Var& a, const Var& b) {
  return elementwise2(a, b, "mul", [](float x, float y) { return x * y; },
                      [](float x, float y) { return std::pair<float, float>{y, x}; });
}

Var scale(const Var& a, float s) {
  return elementwise1(a, "scale", [s](float x) { return s * x; }, [s](float, float) { return s; });
}

Var add_scalar(const Var& a, float s) {
  return elementwise1(a, "add_scalar", [s](float x) { return x + s; }, [](float, float) { return 1.0f; });
}

Var relu(const Var& x) {
  // Subgradient at 0 is 0.
  return elementwise1(x, "relu", [](float v) { return v > 0.0f ? v : 0.0f; },
                      [](float v, float) { return v > 0.0f ? 1.0f : 0.0f; });
}

Var leaky_relu(const Var& x, float slope) {
  return elementwise1(x, "leaky_relu", [slope](float v) { return v > 0.0f ? v : slope * v; },
                      [slope](float v, float) { return v > 0.0f ? 1.0f : slope; });
}

Var tanh_act(const Var& x) {
  return elementwise1(x, "tanh", [](float v) { return std::tanh(v); },
                      [](float, float y) { return 1.0f - y * y; });
}

Var sigmoid(const Var& x) {
  return elementwise1(x, "sigmoid", [](float v) { return 1.0f / (1.0f + std::exp(-v)); },
                      [](float, float y) { return y * (1.0f - y); });
}

Var exp_op(const Var& x) {
  return elementwise1(x, "exp", [](float v) { return std::exp(v); }, [](float, float y) { return y; });
}

Var clamp(const Var& x, float lo, float hi) {
  return elementwise1(x, "clamp", [lo, hi](float v) { return v < lo ? lo : (v > hi ? hi : v); },
                      [lo, hi](float v, float) { return (v >= lo && v <= hi) ? 1.0f : 0.0f; });
}

Var matmul(const Var& a, const Var& b) {
  require(a.value().rank() == 2 && b.value().rank() == 2, "matmul: operands must be rank-2");
  const int m = a.shape()[0], k = a.shape()[1];
  const int k2 = b.shape()[0], n = b.shape()[1];
  require(k == k2, "matmul: inner dimensions disagree " + shape_str(a.shape()) + " * " + shape_str(b.shape()));
  Tensor out({m, n});
  detail::gemm(m, k, n, a.value().data(), b.value().data(), out.data(), false);
  return make_op(
      std::move(out), {a, b},
      [m, k, n](Node& self) {
        Node* na = self.parents[0].get();
        Node* nb = self.parents[1].get();
        const float* g = self.value.grad();
        if (na->needs_grad) {
          std::vector<float> bt(static_cast<size_t>(k) * n);
          detail::transpose(k, n, nb->value.data(), bt.data());
          detail::gemm(m, n, k, g, bt.data(), na->value.grad(), true);
        }
        if (nb->needs_grad) detail::gemm_ta(m, k, n, na->value.data(), g, nb->value.grad());
      },
      "matmul");
}

Var dense(const Var& x, const Var& w, const Var& b) {
  require(x.value().rank() == 2 && w.value().rank() == 2 && b.value().rank() == 1,
          "dense: expected x[BxI], w[IxO], b[O]");
  const int batch = x.shape()[0], in = x.shape()[1];
  const int in2 = w.shape()[0], out_dim = w.shape()[1];
  require(in == in2, "dense: inner dimensions disagree " + shape_str(x.shape()) + " * " + shape_str(w.shape()));
  require(b.shape()[0] == out_dim, "dense: bias length != output width");
  Tensor out({batch, out_dim});
  detail::gemm(batch, in, out_dim, x.value().data(), w.value().data(), out.data(), false);
  const float* pb = b.value().data();
  for (int i = 0; i < batch; ++i) {
    float* row = out.data() + static_cast<size_t>(i) * out_dim;
    for (int j = 0; j < out_dim; ++j) row[j] += pb[j];
  }
  return make_op(
      std::move(out), {x, w, b},
      [batch, in, out_dim](Node& self) {
        Node* nx = self.parents[0].get();
        Node* nw = self.parents[1].get();
        Node* nb = self.parents[2].get();
        const float* g = self.value.grad();
        if (nx->needs_grad) {
          std::vector<float> wt(static_cast<size_t>(in) * out_dim);
          detail::transpose(in, out_dim, nw->value.data(), wt.data());
          detail::gemm(batch, out_dim, in, g, wt.data(), nx->value.grad(), true);
        }
        if (nw->needs_grad) detail::gemm_ta(batch, in, out_dim, nx->value.data(), g, nw->value.grad());
        if (nb->needs_grad) {
          float* gb = nb->value.grad();
          for (int i = 0; i < batch; ++i) {
            const float* row = g + static_cast<size_t>(i) * out_dim;
            for (int j = 0; j < out_dim; ++j) gb[j] += row[j];
          }
        }
      },
      "dense");
}

namespace {

// (B,C,P) channel-major <-> (B*P,C) patch-major reshuffles.
void to_patch_major(int batch, int ch, int p, const float* src, float* dst) {
  for (int b = 0; b < batch; ++b) {
    const float* s = src + static_cast<size_t>(b) * ch * p;
    float* d = dst + static_cast<size_t>(b) * p * ch;
    detail::transpose(ch, p, s, d);
  }
}

void from_patch_major(int batch, int ch, int p, const float* src, float* dst) {
  for (int b = 0; b < batch; ++b) {
    const float* s = src + static_cast<size_t>(b) * p * ch;
    float* d = dst + static_cast<size_t>(b) * ch * p;
    detail::transpose(p, ch, s, d);
  }
}

}  // namespace

Var conv2d(const Var& x, const Var& kernel, int stride, int pad) {
  require(x.value().rank() == 4 && kernel.value().rank() == 4, "conv2d: expected x[BxCxHxW], kernel[FxCxkxk]");
  const auto& xs = x.shape();
  const auto& ks = kernel.shape();
  require(ks[2] == ks[3], "conv2d: kernel must be square");
  require(xs[1] == ks[1], "conv2d: channel mismatch " + shape_str(xs) + " vs kernel " + shape_str(ks));
  const int batch = xs[0], filters = ks[0];
  ConvGeom g = detail::make_conv_geom(xs[1], xs[2], xs[3], ks[2], stride, pad);
  const int patches = g.patches(), plen = g.patch_len();

  auto cols = std::make_shared<std::vector<float>>(static_cast<size_t>(batch) * patches * plen);
  for (int b = 0; b < batch; ++b)
    detail::im2col(g, x.value().data() + static_cast<size_t>(b) * g.channels * g.in_h * g.in_w,
                   cols->data() + static_cast<size_t>(b) * patches * plen);

  // y2[(b*P+p), f] = cols[(b*P+p), :] . kernel[f, :]
  std::vector<float> kt(static_cast<size_t>(plen) * filters);
  detail::transpose(filters, plen, kernel.value().data(), kt.data());
  std::vector<float> y2(static_cast<size_t>(batch) * patches * filters);
  detail::gemm(batch * patches, plen, filters, cols->data(), kt.data(), y2.data(), false);

  Tensor out({batch, filters, g.out_h, g.out_w});
  from_patch_major(batch, filters, patches, y2.data(), out.data());

  return make_op(
      std::move(out), {x, kernel},
      [g, batch, filters, patches, plen, cols](Node& self) {
        Node* nx = self.parents[0].get();
        Node* nk = self.parents[1].get();
        std::vector<float> gy2(static_cast<size_t>(batch) * patches * filters);
        to_patch_major(batch, filters, patches, self.value.grad(), gy2.data());
        if (nk->needs_grad) {
          // dkt[k, f] += cols^T * gy2, then fold back to [F x K].
          std::vector<float> dkt(static_cast<size_t>(plen) * filters, 0.0f);
          detail::gemm_ta(batch * patches, plen, filters, cols->data(), gy2.data(), dkt.data());
          float* gk = nk->value.grad();
          for (int k = 0; k < plen; ++k)
            for (int f = 0; f < filters; ++f) gk[static_cast<size_t>(f) * plen + k] += dkt[static_cast<size_t>(k) * filters + f];
        }
        if (nx->needs_grad) {
          // dcols = gy2 * kernel[F x K]
          std::vector<float> dcols(static_cast<size_t>(batch) * patches * plen);
          detail::gemm(batch * patches, filters, plen, gy2.data(), nk->value.data(), dcols.data(), false);
          for (int b = 0; b < batch; ++b)
            detail::col2im_add(g, dcols.data() + static_cast<size_t>(b) * patches * plen,
                               nx->value.grad() + static_cast<size_t>(b) * g.channels * g.in_h * g.in_w);
        }
      },
      "conv2d");
}

Var transpose_conv2d(const Var& x, const Var& kernel, int stride, int pad) {
  require(x.value().rank() == 4 && kernel.value().rank() == 4,
          "transpose_conv2d: expected x[BxCxHxW], kernel[CxFxkxk]");
  const auto& xs = x.shape();
  const auto& ks = kernel.shape();
  require(ks[2] == ks[3], "transpose_conv2d: kernel must be square");
  require(xs[1] == ks[0], "transpose_conv2d: channel mismatch " + shape_str(xs) + " vs kernel " + shape_str(ks));
  const int batch = xs[0], ch = xs[1], filters = ks[1], ksize = ks[2];
  const int out_h = (xs[2] - 1) * stride - 2 * pad + ksize;
  const int out_w = (xs[3] - 1) * stride - 2 * pad + ksize;
  require(out_h > 0 && out_w > 0, "transpose_conv2d: non-positive output extent");
  // Adjoint geometry: conv2d over the *output* image produces patches at the
  // input positions.
  ConvGeom g = detail::make_conv_geom(filters, out_h, out_w, ksize, stride, pad);
  require(g.out_h == xs[2] && g.out_w == xs[3], "transpose_conv2d: geometry mismatch");
  const int patches = g.patches(), plen = g.patch_len();

  // x2[(b*P+p), c]; colsY = x2 * kmat[C x (F*k*k)]
  auto x2 = std::make_shared<std::vector<float>>(static_cast<size_t>(batch) * patches * ch);
  to_patch_major(batch, ch, patches, x.value().data(), x2->data());
  std::vector<float> cols_y(static_cast<size_t>(batch) * patches * plen);
  detail::gemm(batch * patches, ch, plen, x2->data(), kernel.value().data(), cols_y.data(), false);

  Tensor out({batch, filters, out_h, out_w});
  for (int b = 0; b < batch; ++b)
    detail::col2im_add(g, cols_y.data() + static_cast<size_t>(b) * patches * plen,
                       out.data() + static_cast<size_t>(b) * filters * out_h * out_w);

  return make_op(
      std::move(out), {x, kernel},
      [g, batch, ch, filters, patches, plen, x2](Node& self) {
        Node* nx = self.parents[0].get();
        Node* nk = self.parents[1].get();
        std::vector<float> gcols(static_cast<size_t>(batch) * patches * plen);
        for (int b = 0; b < batch; ++b)
          detail::im2col(g, self.value.grad() + static_cast<size_t>(b) * filters * g.in_h * g.in_w,
                         gcols.data() + static_cast<size_t>(b) * patches * plen);
        if (nk->needs_grad) detail::gemm_ta(batch * patches, ch, plen, x2->data(), gcols.data(), nk->value.grad());
        if (nx->needs_grad) {
          std::vector<float> kt(static_cast<size_t>(plen) * ch);
          detail::transpose(ch, plen, nk->value.data(), kt.data());
          std::vector<float> gx2(static_cast<size_t>(batch) * patches * ch);
          detail::gemm(batch * patches, plen, ch, gcols.data(), kt.data(), gx2.data(), false);
          std::vector<float> gx(static_cast<size_t>(batch) * ch * patches);
          from_patch_major(batch, ch, patches, gx2.data(), gx.data());
          float* dst = nx->value.grad();
          const int64_t n = static_cast<int64_t>(gx.size());
          for (int64_t i = 0; i < n; ++i) dst[i] += gx[i];
        }
      },
      "transpose_conv2d");
}

Var sum(const Var& x) {
  double acc = 0.0;
  const float* px = x.value().data();
  const int64_t n = x.value().size();
  for (int64_t i = 0; i < n; ++i) acc += px[i];
  return make_op(
      Tensor::scalar(static_cast<float>(acc)), {x},
      [](Node& self) {
        const float g = self.value.grad()[0];
        Node* nx = self.parents[0].get();
        float* gx = nx->value.grad();
        const int64_t n = nx->value.size();
        for (int64_t i = 0; i < n; ++i) gx[i] += g;
      },
      "sum");
}

Var mean(const Var& x) {
  const int64_t n = x.value().size();
  return scale(sum(x), 1.0f / static_cast<float>(n));
}

Var mse(const Var& a, const Var& b) {
  Var d = sub(a, b);
  return mean(mul(d, d));
}

Var slice_cols(const Var& x, int start, int len) {
  require(x.value().rank() == 2, "slice_cols: expected rank-2");
  const int batch = x.shape()[0], width = x.shape()[1];
  require(start >= 0 && len > 0 && start + len <= width, "slice_cols: range out of bounds");
  Tensor out({batch, len});
  for (int i = 0; i < batch; ++i)
    std::memcpy(out.data() + static_cast<size_t>(i) * len, x.value().data() + static_cast<size_t>(i) * width + start,
                sizeof(float) * len);
  return make_op(
      std::move(out), {x},
      [batch, width, start, len](Node& self) {
        Node* nx = self.parents[0].get();
        float* gx = nx->value.grad();
        const float* g = self.value.grad();
        for (int i = 0; i < batch; ++i) {
          const float* grow = g + static_cast<size_t>(i) * len;
          float* xrow = gx + static_cast<size_t>(i) * width + start;
          for (int j = 0; j < len; ++j) xrow[j] += grow[j];
        }
      },
      "slice_cols");
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const int batch = parts[0].shape()[0];
  int width = 0;
  for (const auto& p : parts) {
    require(p.value().rank() == 2 && p.shape()[0] == batch, "concat_cols: inconsistent shapes");
    width += p.shape()[1];
  }
  Tensor out({batch, width});
  int off = 0;
  for (const auto& p : parts) {
    const int w = p.shape()[1];
    for (int i = 0; i < batch; ++i)
      std::memcpy(out.data() + static_cast<size_t>(i) * width + off,
                  p.value().data() + static_cast<size_t>(i) * w, sizeof(float) * w);
    off += w;
  }
  return make_op(
      std::move(out), parts,
      [batch, width](Node& self) {
        const float* g = self.value.grad();
        int off = 0;
        for (auto& parent : self.parents) {
          const int w = parent->value.shape()[1];
          if (parent->needs_grad) {
            float* gp = parent->value.grad();
            for (int i = 0; i < batch; ++i) {
              const float* grow = g + static_cast<size_t>(i) * width + off;
              float* prow = gp + static_cast<size_t>(i) * w;
              for (int j = 0; j < w; ++j) prow[j] += grow[j];
            }
          }
          off += w;
        }
      },
      "concat_cols");
}

Var reshape(const Var& x, std::vector<int> shape) {
  require(shape_numel(shape) == x.value().size(),
          "reshape: element count mismatch " + shape_str(x.shape()) + " -> " + shape_str(shape));
  Tensor out(std::move(shape), x.value().vec());
  return make_op(
      std::move(out), {x},
      [](Node& self) {
        Node* nx = self.parents[0].get();
        float* gx = nx->value.grad();
        const float* g = self.value.grad();
        const int64_t n = nx->value.size();
        for (int64_t i = 0; i < n; ++i) gx[i] += g[i];
      },
      "reshape");
}

}  // namespace gatenav::nn
