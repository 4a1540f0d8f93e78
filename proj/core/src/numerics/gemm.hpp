#pragma once

// Internal dense kernels behind the conv/dense ops. Row-major throughout.
// Loop nests keep the innermost index contiguous so -O3 vectorizes them.

namespace gatenav::nn::detail {

// C[M x N] (+)= A[M x K] * B[K x N]
void gemm(int m, int k, int n, const float* a, const float* b, float* c, bool accumulate);

// C[M x N] += A^T * B where A is [P x M], B is [P x N]
void gemm_ta(int p, int m, int n, const float* a, const float* b, float* c);

// dst[c x r] = src[r x c]^T
void transpose(int rows, int cols, const float* src, float* dst);

// Convolution geometry shared by conv2d / transpose_conv2d and their adjoints.
struct ConvGeom {
  int channels = 0;
  int in_h = 0, in_w = 0;
  int ksize = 0;
  int stride = 1;
  int pad = 0;
  int out_h = 0, out_w = 0;  // floor((in + 2*pad - k)/stride) + 1

  int patch_len() const { return channels * ksize * ksize; }
  int patches() const { return out_h * out_w; }
};

ConvGeom make_conv_geom(int channels, int in_h, int in_w, int ksize, int stride, int pad);

// Patch-major im2col: cols[p][c*k*k + ki*k + kj], p = oy*out_w + ox.
void im2col(const ConvGeom& g, const float* image, float* cols);
// Adjoint scatter-add of im2col. image must be pre-zeroed by the caller when
// accumulate semantics are not wanted.
void col2im_add(const ConvGeom& g, const float* cols, float* image);

}  // namespace gatenav::nn::detail
