// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace p2p::nn {

// Low-level float32 kernels. The production versions are OpenMP-parallel and
// register-blocked; namespace ref holds plain serial implementations kept
// for testing and benchmarking (tools/bench_kernels.cpp compares them).
//
// Determinism contract: every output element is produced by exactly one
// thread with a fixed inner summation order, so results do not depend on the
// worker count.

// C(MxN) = A(MxK) * B(KxN), all row-major. accumulate adds into C.
void sgemm(int64_t M, int64_t N, int64_t K, const float* A, const float* B, float* C,
           bool accumulate);

// im2col for 2D convolution over one sample. Input (C,H,W) row-major; output
// cols is (C*kh*kw) x (Ho*Wo) with zero padding.
void im2col2d(const float* x, int C, int H, int W, int kh, int kw, int stride, int pad,
              float* cols);

// Transposed variant, (Ho*Wo) x (C*kh*kw); weight gradients flow through the
// wide side of the GEMM this way.
void im2col2d_t(const float* x, int C, int H, int W, int kh, int kw, int stride, int pad,
                float* cols_t);

// Transposed scatter-add of cols back into the input gradient (zero-initialised
// by the caller). Serial over its input; callers parallelise across samples.
void col2im2d_add(const float* cols, int C, int H, int W, int kh, int kw, int stride, int pad,
                  float* dx);

// 3D variants; axes ordered (D,H,W) with independent stride/pad per axis.
void im2col3d(const float* x, int C, int D, int H, int W, int kd, int kh, int kw, int sd, int sh,
              int sw, int pd, int ph, int pw, float* cols);
void im2col3d_t(const float* x, int C, int D, int H, int W, int kd, int kh, int kw, int sd,
                int sh, int sw, int pd, int ph, int pw, float* cols_t);
void col2im3d_add(const float* cols, int C, int D, int H, int W, int kd, int kh, int kw, int sd,
                  int sh, int sw, int pd, int ph, int pw, float* dx);

inline int conv_out_size(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

namespace ref {
void sgemm(int64_t M, int64_t N, int64_t K, const float* A, const float* B, float* C,
           bool accumulate);
}  // namespace ref

}  // namespace p2p::nn
