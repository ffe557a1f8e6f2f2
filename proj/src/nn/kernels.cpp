// SPDX-License-Identifier: Apache-2.0
#include "p2p/nn/kernels.hpp"

#include <algorithm>
#include <cstring>

namespace p2p::nn {

namespace {

constexpr int64_t kNPanel = 512;  // columns per OpenMP task

// Register tiles. Every variant walks k in ascending order with one fused
// multiply-add per element per step, so each output element sees the same
// summation order no matter which tile or edge path produced it.
template <int MR, int NR>
inline void tile(int64_t K, const float* __restrict A, int64_t lda, const float* __restrict B,
                 int64_t ldb, float* __restrict C, int64_t ldc, bool accumulate) {
    float acc[MR][NR];
    if (accumulate) {
        for (int m = 0; m < MR; ++m)
            for (int n = 0; n < NR; ++n) acc[m][n] = C[m * ldc + n];
    } else {
        for (int m = 0; m < MR; ++m)
            for (int n = 0; n < NR; ++n) acc[m][n] = 0.0f;
    }
    for (int64_t k = 0; k < K; ++k) {
        const float* __restrict brow = B + k * ldb;
        for (int m = 0; m < MR; ++m) {
            const float a = A[m * lda + k];
            for (int n = 0; n < NR; ++n) acc[m][n] += a * brow[n];
        }
    }
    for (int m = 0; m < MR; ++m)
        for (int n = 0; n < NR; ++n) C[m * ldc + n] = acc[m][n];
}

inline void edge_block(int64_t mr, int64_t nr, int64_t K, const float* A, int64_t lda,
                       const float* B, int64_t ldb, float* C, int64_t ldc, bool accumulate) {
    for (int64_t m = 0; m < mr; ++m) {
        for (int64_t n = 0; n < nr; ++n) {
            float acc = accumulate ? C[m * ldc + n] : 0.0f;
            for (int64_t k = 0; k < K; ++k) acc += A[m * lda + k] * B[k * ldb + n];
            C[m * ldc + n] = acc;
        }
    }
}

// One panel of rows [m0, m0+mr) and columns [j0, j1).
inline void gemm_panel(int64_t mr, int64_t j0, int64_t j1, int64_t N, int64_t K,
                       const float* A, const float* B, float* C, bool accumulate) {
    int64_t m = 0;
    for (; m + 6 <= mr; m += 6) {
        const float* a = A + m * K;
        float* c = C + m * N;
        int64_t j = j0;
        for (; j + 32 <= j1; j += 32) tile<6, 32>(K, a, K, B + j, N, c + j, N, accumulate);
        for (; j + 16 <= j1; j += 16) {
            // 2x16 compiles much tighter than a 6x16 tile here.
            tile<2, 16>(K, a, K, B + j, N, c + j, N, accumulate);
            tile<2, 16>(K, a + 2 * K, K, B + j, N, c + 2 * N + j, N, accumulate);
            tile<2, 16>(K, a + 4 * K, K, B + j, N, c + 4 * N + j, N, accumulate);
        }
        if (j < j1) edge_block(6, j1 - j, K, a, K, B + j, N, c + j, N, accumulate);
    }
    for (; m + 2 <= mr; m += 2) {
        const float* a = A + m * K;
        float* c = C + m * N;
        int64_t j = j0;
        for (; j + 16 <= j1; j += 16) tile<2, 16>(K, a, K, B + j, N, c + j, N, accumulate);
        if (j < j1) edge_block(2, j1 - j, K, a, K, B + j, N, c + j, N, accumulate);
    }
    if (m < mr) {
        const float* a = A + m * K;
        float* c = C + m * N;
        int64_t j = j0;
        for (; j + 16 <= j1; j += 16) tile<1, 16>(K, a, K, B + j, N, c + j, N, accumulate);
        if (j < j1) edge_block(1, j1 - j, K, a, K, B + j, N, c + j, N, accumulate);
    }
}

}  // namespace

void sgemm(int64_t M, int64_t N, int64_t K, const float* A, const float* B, float* C,
           bool accumulate) {
    const int64_t m_block = 12;  // two 6-row tiles per task
    const int64_t m_tiles = (M + m_block - 1) / m_block;
    const int64_t n_panels = (N + kNPanel - 1) / kNPanel;

#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t mt = 0; mt < m_tiles; ++mt) {
        for (int64_t np = 0; np < n_panels; ++np) {
            const int64_t m0 = mt * m_block;
            const int64_t mr = std::min(m_block, M - m0);
            const int64_t j0 = np * kNPanel;
            const int64_t j1 = std::min(j0 + kNPanel, N);
            gemm_panel(mr, j0, j1, N, K, A + m0 * K, B, C + m0 * N, accumulate);
        }
    }
}

void im2col2d(const float* x, int C, int H, int W, int kh, int kw, int stride, int pad,
              float* cols) {
    const int Ho = conv_out_size(H, kh, stride, pad);
    const int Wo = conv_out_size(W, kw, stride, pad);
    const int64_t P = static_cast<int64_t>(Ho) * Wo;
    for (int c = 0; c < C; ++c) {
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                float* dst = cols + ((static_cast<int64_t>(c) * kh + ky) * kw + kx) * P;
                for (int oy = 0; oy < Ho; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= H) {
                        std::memset(dst + static_cast<int64_t>(oy) * Wo, 0, sizeof(float) * Wo);
                        continue;
                    }
                    const float* src = x + (static_cast<int64_t>(c) * H + iy) * W;
                    float* out = dst + static_cast<int64_t>(oy) * Wo;
                    for (int ox = 0; ox < Wo; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        out[ox] = (ix >= 0 && ix < W) ? src[ix] : 0.0f;
                    }
                }
            }
        }
    }
}

void im2col2d_t(const float* x, int C, int H, int W, int kh, int kw, int stride, int pad,
                float* cols_t) {
    const int Ho = conv_out_size(H, kh, stride, pad);
    const int Wo = conv_out_size(W, kw, stride, pad);
    const int64_t K = static_cast<int64_t>(C) * kh * kw;
    int64_t p = 0;
    for (int oy = 0; oy < Ho; ++oy) {
        for (int ox = 0; ox < Wo; ++ox, ++p) {
            float* dst = cols_t + p * K;
            int64_t idx = 0;
            for (int c = 0; c < C; ++c) {
                for (int ky = 0; ky < kh; ++ky) {
                    const int iy = oy * stride + ky - pad;
                    for (int kx = 0; kx < kw; ++kx, ++idx) {
                        const int ix = ox * stride + kx - pad;
                        dst[idx] = (iy >= 0 && iy < H && ix >= 0 && ix < W)
                                       ? x[(static_cast<int64_t>(c) * H + iy) * W + ix]
                                       : 0.0f;
                    }
                }
            }
        }
    }
}

void col2im2d_add(const float* cols, int C, int H, int W, int kh, int kw, int stride, int pad,
                  float* dx) {
    const int Ho = conv_out_size(H, kh, stride, pad);
    const int Wo = conv_out_size(W, kw, stride, pad);
    const int64_t P = static_cast<int64_t>(Ho) * Wo;
    for (int c = 0; c < C; ++c) {
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                const float* src = cols + ((static_cast<int64_t>(c) * kh + ky) * kw + kx) * P;
                for (int oy = 0; oy < Ho; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= H) continue;
                    float* out = dx + (static_cast<int64_t>(c) * H + iy) * W;
                    const float* in = src + static_cast<int64_t>(oy) * Wo;
                    for (int ox = 0; ox < Wo; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix >= 0 && ix < W) out[ix] += in[ox];
                    }
                }
            }
        }
    }
}

void im2col3d(const float* x, int C, int D, int H, int W, int kd, int kh, int kw, int sd, int sh,
              int sw, int pd, int ph, int pw, float* cols) {
    const int Do = conv_out_size(D, kd, sd, pd);
    const int Ho = conv_out_size(H, kh, sh, ph);
    const int Wo = conv_out_size(W, kw, sw, pw);
    const int64_t P = static_cast<int64_t>(Do) * Ho * Wo;
    int64_t row = 0;
    for (int c = 0; c < C; ++c) {
        for (int kz = 0; kz < kd; ++kz) {
            for (int ky = 0; ky < kh; ++ky) {
                for (int kx = 0; kx < kw; ++kx, ++row) {
                    float* dst = cols + row * P;
                    int64_t p = 0;
                    for (int od = 0; od < Do; ++od) {
                        const int id = od * sd + kz - pd;
                        for (int oy = 0; oy < Ho; ++oy) {
                            const int iy = oy * sh + ky - ph;
                            for (int ox = 0; ox < Wo; ++ox, ++p) {
                                const int ix = ox * sw + kx - pw;
                                const bool in =
                                    id >= 0 && id < D && iy >= 0 && iy < H && ix >= 0 && ix < W;
                                dst[p] = in ? x[((static_cast<int64_t>(c) * D + id) * H + iy) * W + ix]
                                            : 0.0f;
                            }
                        }
                    }
                }
            }
        }
    }
}

void im2col3d_t(const float* x, int C, int D, int H, int W, int kd, int kh, int kw, int sd,
                int sh, int sw, int pd, int ph, int pw, float* cols_t) {
    const int Do = conv_out_size(D, kd, sd, pd);
    const int Ho = conv_out_size(H, kh, sh, ph);
    const int Wo = conv_out_size(W, kw, sw, pw);
    const int64_t K = static_cast<int64_t>(C) * kd * kh * kw;
    int64_t p = 0;
    for (int od = 0; od < Do; ++od) {
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox, ++p) {
                float* dst = cols_t + p * K;
                int64_t idx = 0;
                for (int c = 0; c < C; ++c) {
                    for (int kz = 0; kz < kd; ++kz) {
                        const int id = od * sd + kz - pd;
                        for (int ky = 0; ky < kh; ++ky) {
                            const int iy = oy * sh + ky - ph;
                            for (int kx = 0; kx < kw; ++kx, ++idx) {
                                const int ix = ox * sw + kx - pw;
                                const bool in =
                                    id >= 0 && id < D && iy >= 0 && iy < H && ix >= 0 && ix < W;
                                dst[idx] =
                                    in ? x[((static_cast<int64_t>(c) * D + id) * H + iy) * W + ix]
                                       : 0.0f;
                            }
                        }
                    }
                }
            }
        }
    }
}

void col2im3d_add(const float* cols, int C, int D, int H, int W, int kd, int kh, int kw, int sd,
                  int sh, int sw, int pd, int ph, int pw, float* dx) {
    const int Do = conv_out_size(D, kd, sd, pd);
    const int Ho = conv_out_size(H, kh, sh, ph);
    const int Wo = conv_out_size(W, kw, sw, pw);
    const int64_t P = static_cast<int64_t>(Do) * Ho * Wo;
    int64_t row = 0;
    for (int c = 0; c < C; ++c) {
        for (int kz = 0; kz < kd; ++kz) {
            for (int ky = 0; ky < kh; ++ky) {
                for (int kx = 0; kx < kw; ++kx, ++row) {
                    const float* src = cols + row * P;
                    int64_t p = 0;
                    for (int od = 0; od < Do; ++od) {
                        const int id = od * sd + kz - pd;
                        for (int oy = 0; oy < Ho; ++oy) {
                            const int iy = oy * sh + ky - ph;
                            for (int ox = 0; ox < Wo; ++ox, ++p) {
                                const int ix = ox * sw + kx - pw;
                                if (id >= 0 && id < D && iy >= 0 && iy < H && ix >= 0 && ix < W) {
                                    dx[((static_cast<int64_t>(c) * D + id) * H + iy) * W + ix] +=
                                        src[p];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

}  // namespace p2p::nn
