#include "gemm.hpp"

#include <cstring>

#include "gatenav/common/error.hpp"

namespace gatenav::nn::detail {

void gemm(int m, int k, int n, const float* a, const float* b, float* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(float) * static_cast<size_t>(m) * static_cast<size_t>(n));
  for (int i = 0; i < m; ++i) {
    const float* arow = a + static_cast<size_t>(i) * k;
    float* crow = c + static_cast<size_t>(i) * n;
    for (int kk = 0; kk < k; ++kk) {
      const float av = arow[kk];
      if (av == 0.0f) continue;
      const float* brow = b + static_cast<size_t>(kk) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_ta(int p, int m, int n, const float* a, const float* b, float* c) {
  for (int i = 0; i < p; ++i) {
    const float* arow = a + static_cast<size_t>(i) * m;
    const float* brow = b + static_cast<size_t>(i) * n;
    for (int mm = 0; mm < m; ++mm) {
      const float av = arow[mm];
      if (av == 0.0f) continue;
      float* crow = c + static_cast<size_t>(mm) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void transpose(int rows, int cols, const float* src, float* dst) {
  for (int r = 0; r < rows; ++r)
    for (int ci = 0; ci < cols; ++ci) dst[static_cast<size_t>(ci) * rows + r] = src[static_cast<size_t>(r) * cols + ci];
}

ConvGeom make_conv_geom(int channels, int in_h, int in_w, int ksize, int stride, int pad) {
  ConvGeom g;
  g.channels = channels;
  g.in_h = in_h;
  g.in_w = in_w;
  g.ksize = ksize;
  g.stride = stride;
  g.pad = pad;
  g.out_h = (in_h + 2 * pad - ksize) / stride + 1;
  g.out_w = (in_w + 2 * pad - ksize) / stride + 1;
  if (stride < 1 || pad < 0) throw ConfigError("conv geometry: stride must be >= 1 and pad >= 0");
  if (in_h + 2 * pad < ksize || in_w + 2 * pad < ksize || g.out_h <= 0 || g.out_w <= 0)
    throw ConfigError("conv geometry: non-positive output extent");
  return g;
}

void im2col(const ConvGeom& g, const float* image, float* cols) {
  const int kk = g.ksize;
  const int plen = g.patch_len();
  for (int oy = 0; oy < g.out_h; ++oy) {
    for (int ox = 0; ox < g.out_w; ++ox) {
      float* patch = cols + static_cast<size_t>(oy * g.out_w + ox) * plen;
      const int y0 = oy * g.stride - g.pad;
      const int x0 = ox * g.stride - g.pad;
      for (int c = 0; c < g.channels; ++c) {
        const float* plane = image + static_cast<size_t>(c) * g.in_h * g.in_w;
        for (int ky = 0; ky < kk; ++ky) {
          const int y = y0 + ky;
          float* prow = patch + (c * kk + ky) * kk;
          if (y < 0 || y >= g.in_h) {
            std::memset(prow, 0, sizeof(float) * kk);
            continue;
          }
          const float* irow = plane + static_cast<size_t>(y) * g.in_w;
          for (int kx = 0; kx < kk; ++kx) {
            const int x = x0 + kx;
            prow[kx] = (x >= 0 && x < g.in_w) ? irow[x] : 0.0f;
          }
        }
      }
    }
  }
}

void col2im_add(const ConvGeom& g, const float* cols, float* image) {
  const int kk = g.ksize;
  const int plen = g.patch_len();
  for (int oy = 0; oy < g.out_h; ++oy) {
    for (int ox = 0; ox < g.out_w; ++ox) {
      const float* patch = cols + static_cast<size_t>(oy * g.out_w + ox) * plen;
      const int y0 = oy * g.stride - g.pad;
      const int x0 = ox * g.stride - g.pad;
      for (int c = 0; c < g.channels; ++c) {
        float* plane = image + static_cast<size_t>(c) * g.in_h * g.in_w;
        for (int ky = 0; ky < kk; ++ky) {
          const int y = y0 + ky;
          if (y < 0 || y >= g.in_h) continue;
          const float* prow = patch + (c * kk + ky) * kk;
          float* irow = plane + static_cast<size_t>(y) * g.in_w;
          for (int kx = 0; kx < kk; ++kx) {
            const int x = x0 + kx;
            if (x >= 0 && x < g.in_w) irow[x] += prow[kx];
          }
        }
      }
    }
  }
}

}  // namespace gatenav::nn::detail
