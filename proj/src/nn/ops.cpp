// SPDX-License-Identifier: Apache-2.0
#include "p2p/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "p2p/nn/kernels.hpp"

namespace p2p::nn {

namespace {

void check_conv2d_shapes(const Tensor& x, const Tensor& w, int stride, int pad) {
    require_shape(x.rank() == 4, "conv2d: input must be NxCxHxW, got " + x.shape_str());
    require_shape(w.rank() == 4, "conv2d: weights must be FxCxkhxkw, got " + w.shape_str());
    require_shape(x.dim(1) == w.dim(1), "conv2d: channel mismatch");
    require_shape(stride >= 1, "conv2d: stride must be >= 1");
    require_shape(x.dim(2) + 2 * pad >= w.dim(2) && x.dim(3) + 2 * pad >= w.dim(3),
                  "conv2d: kernel does not fit padded input");
}

void check_conv3d_shapes(const Tensor& x, const Tensor& w, int sd, int sh, int sw, int pd, int ph,
                         int pw) {
    require_shape(x.rank() == 5, "conv3d: input must be NxCxDxHxW, got " + x.shape_str());
    require_shape(w.rank() == 5, "conv3d: weights must be FxCxkdxkhxkw, got " + w.shape_str());
    require_shape(x.dim(1) == w.dim(1), "conv3d: channel mismatch");
    require_shape(sd >= 1 && sh >= 1 && sw >= 1, "conv3d: stride must be >= 1");
    require_shape(x.dim(2) + 2 * pd >= w.dim(2) && x.dim(3) + 2 * ph >= w.dim(3) &&
                      x.dim(4) + 2 * pw >= w.dim(4),
                  "conv3d: kernel does not fit padded input");
}

void add_bias(float* y, const float* b, int64_t F, int64_t P) {
    for (int64_t f = 0; f < F; ++f) {
        float* row = y + f * P;
        const float bf = b[f];
        for (int64_t p = 0; p < P; ++p) row[p] += bf;
    }
}

}  // namespace

Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
    check_conv2d_shapes(x, w, stride, pad);
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
    const int F = static_cast<int>(w.dim(0)), kh = static_cast<int>(w.dim(2)),
              kw = static_cast<int>(w.dim(3));
    require_shape(b.numel() == F, "conv2d: bias size mismatch");
    const int Ho = conv_out_size(H, kh, stride, pad);
    const int Wo = conv_out_size(W, kw, stride, pad);
    const int64_t K = static_cast<int64_t>(C) * kh * kw;
    const int64_t P = static_cast<int64_t>(Ho) * Wo;

    Tensor y({N, F, Ho, Wo});
    std::vector<float> cols(static_cast<size_t>(K * P));
    for (int n = 0; n < N; ++n) {
        im2col2d(x.data() + static_cast<int64_t>(n) * C * H * W, C, H, W, kh, kw, stride, pad,
                 cols.data());
        float* yn = y.data() + static_cast<int64_t>(n) * F * P;
        sgemm(F, P, K, w.data(), cols.data(), yn, false);
        add_bias(yn, b.data(), F, P);
    }
    return y;
}

Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int stride,
                            int pad, bool need_dx) {
    check_conv2d_shapes(x, w, stride, pad);
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
    const int F = static_cast<int>(w.dim(0)), kh = static_cast<int>(w.dim(2)),
              kw = static_cast<int>(w.dim(3));
    const int Ho = conv_out_size(H, kh, stride, pad);
    const int Wo = conv_out_size(W, kw, stride, pad);
    require_shape(dy.rank() == 4 && dy.dim(0) == N && dy.dim(1) == F && dy.dim(2) == Ho &&
                      dy.dim(3) == Wo,
                  "conv2d backward: upstream shape mismatch");
    const int64_t K = static_cast<int64_t>(C) * kh * kw;
    const int64_t P = static_cast<int64_t>(Ho) * Wo;

    Conv2dGrads g;
    g.dw = Tensor::zeros_like(w);
    g.db = Tensor({F});
    if (need_dx) g.dx = Tensor::zeros_like(x);

    // dB: fixed-order reduction over samples and positions, parallel over F.
#pragma omp parallel for schedule(static)
    for (int f = 0; f < F; ++f) {
        float acc = 0.0f;
        for (int n = 0; n < N; ++n) {
            const float* row = dy.data() + (static_cast<int64_t>(n) * F + f) * P;
            for (int64_t p = 0; p < P; ++p) acc += row[p];
        }
        g.db[f] = acc;
    }

    // Transposed weights for the input gradient.
    Tensor wt({K, F});
    if (need_dx) {
        for (int f = 0; f < F; ++f)
            for (int64_t k = 0; k < K; ++k) wt[k * F + f] = w[f * K + k];
    }

    std::vector<float> cols_t(static_cast<size_t>(K * P));
    std::vector<float> dcols(need_dx ? static_cast<size_t>(K * P) : 0);
    for (int n = 0; n < N; ++n) {
        const float* xn = x.data() + static_cast<int64_t>(n) * C * H * W;
        const float* dyn = dy.data() + static_cast<int64_t>(n) * F * P;
        im2col2d_t(xn, C, H, W, kh, kw, stride, pad, cols_t.data());
        // dW += dY_n (FxP) * cols_t (PxK)
        sgemm(F, K, P, dyn, cols_t.data(), g.dw.data(), true);
        if (need_dx) {
            sgemm(K, P, F, wt.data(), dyn, dcols.data(), false);
            col2im2d_add(dcols.data(), C, H, W, kh, kw, stride, pad,
                         g.dx.data() + static_cast<int64_t>(n) * C * H * W);
        }
    }
    return g;
}

Tensor conv3d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int sd, int sh, int sw,
                      int pd, int ph, int pw) {
    check_conv3d_shapes(x, w, sd, sh, sw, pd, ph, pw);
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int D = static_cast<int>(x.dim(2)), H = static_cast<int>(x.dim(3)),
              W = static_cast<int>(x.dim(4));
    const int F = static_cast<int>(w.dim(0)), kd = static_cast<int>(w.dim(2)),
              kh = static_cast<int>(w.dim(3)), kw = static_cast<int>(w.dim(4));
    require_shape(b.numel() == F, "conv3d: bias size mismatch");
    const int Do = conv_out_size(D, kd, sd, pd);
    const int Ho = conv_out_size(H, kh, sh, ph);
    const int Wo = conv_out_size(W, kw, sw, pw);
    const int64_t K = static_cast<int64_t>(C) * kd * kh * kw;
    const int64_t P = static_cast<int64_t>(Do) * Ho * Wo;

    Tensor y({N, F, Do, Ho, Wo});
    std::vector<float> cols(static_cast<size_t>(K * P));
    for (int n = 0; n < N; ++n) {
        im2col3d(x.data() + static_cast<int64_t>(n) * C * D * H * W, C, D, H, W, kd, kh, kw, sd,
                 sh, sw, pd, ph, pw, cols.data());
        float* yn = y.data() + static_cast<int64_t>(n) * F * P;
        sgemm(F, P, K, w.data(), cols.data(), yn, false);
        add_bias(yn, b.data(), F, P);
    }
    return y;
}

Conv3dGrads conv3d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int sd, int sh,
                            int sw, int pd, int ph, int pw, bool need_dx) {
    check_conv3d_shapes(x, w, sd, sh, sw, pd, ph, pw);
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int D = static_cast<int>(x.dim(2)), H = static_cast<int>(x.dim(3)),
              W = static_cast<int>(x.dim(4));
    const int F = static_cast<int>(w.dim(0)), kd = static_cast<int>(w.dim(2)),
              kh = static_cast<int>(w.dim(3)), kw = static_cast<int>(w.dim(4));
    const int Do = conv_out_size(D, kd, sd, pd);
    const int Ho = conv_out_size(H, kh, sh, ph);
    const int Wo = conv_out_size(W, kw, sw, pw);
    require_shape(dy.rank() == 5 && dy.dim(0) == N && dy.dim(1) == F && dy.dim(2) == Do &&
                      dy.dim(3) == Ho && dy.dim(4) == Wo,
                  "conv3d backward: upstream shape mismatch");
    const int64_t K = static_cast<int64_t>(C) * kd * kh * kw;
    const int64_t P = static_cast<int64_t>(Do) * Ho * Wo;

    Conv3dGrads g;
    g.dw = Tensor::zeros_like(w);
    g.db = Tensor({F});
    if (need_dx) g.dx = Tensor::zeros_like(x);

#pragma omp parallel for schedule(static)
    for (int f = 0; f < F; ++f) {
        float acc = 0.0f;
        for (int n = 0; n < N; ++n) {
            const float* row = dy.data() + (static_cast<int64_t>(n) * F + f) * P;
            for (int64_t p = 0; p < P; ++p) acc += row[p];
        }
        g.db[f] = acc;
    }

    Tensor wt({K, F});
    if (need_dx) {
        for (int f = 0; f < F; ++f)
            for (int64_t k = 0; k < K; ++k) wt[k * F + f] = w[f * K + k];
    }

    std::vector<float> cols_t(static_cast<size_t>(K * P));
    std::vector<float> dcols(need_dx ? static_cast<size_t>(K * P) : 0);
    for (int n = 0; n < N; ++n) {
        const float* xn = x.data() + static_cast<int64_t>(n) * C * D * H * W;
        const float* dyn = dy.data() + static_cast<int64_t>(n) * F * P;
        im2col3d_t(xn, C, D, H, W, kd, kh, kw, sd, sh, sw, pd, ph, pw, cols_t.data());
        sgemm(F, K, P, dyn, cols_t.data(), g.dw.data(), true);
        if (need_dx) {
            sgemm(K, P, F, wt.data(), dyn, dcols.data(), false);
            col2im3d_add(dcols.data(), C, D, H, W, kd, kh, kw, sd, sh, sw, pd, ph, pw,
                         g.dx.data() + static_cast<int64_t>(n) * C * D * H * W);
        }
    }
    return g;
}

Tensor relu_forward(const Tensor& x) {
    Tensor y = x;
    float* d = y.data();
    const int64_t n = y.numel();
#pragma omp parallel for schedule(static) if (n > 16384)
    for (int64_t i = 0; i < n; ++i) d[i] = d[i] > 0.0f ? d[i] : 0.0f;
    return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
    require_shape(x.same_shape(dy), "relu backward: shape mismatch");
    Tensor dx = dy;
    const int64_t n = dx.numel();
#pragma omp parallel for schedule(static) if (n > 16384)
    for (int64_t i = 0; i < n; ++i) {
        if (x[i] <= 0.0f) dx[i] = 0.0f;
    }
    return dx;
}

Tensor upsample2x_forward(const Tensor& x) {
    require_shape(x.rank() == 4, "upsample2x: input must be NxCxHxW");
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
    const int Ho = 2 * H, Wo = 2 * W;
    Tensor y({N, C, Ho, Wo});

    // align_corners=false: source coordinate (o + 0.5)/2 - 0.5, edge-clamped.
    std::vector<int> x0(Wo), x1(Wo);
    std::vector<float> fx(Wo);
    for (int o = 0; o < Wo; ++o) {
        double s = (o + 0.5) * 0.5 - 0.5;
        double fl = std::floor(s);
        int i0 = static_cast<int>(fl);
        fx[o] = static_cast<float>(s - fl);
        x0[o] = std::clamp(i0, 0, W - 1);
        x1[o] = std::clamp(i0 + 1, 0, W - 1);
    }

    const int64_t planes = static_cast<int64_t>(N) * C;
#pragma omp parallel for schedule(static)
    for (int64_t pc = 0; pc < planes; ++pc) {
        const float* src = x.data() + pc * H * W;
        float* dst = y.data() + pc * static_cast<int64_t>(Ho) * Wo;
        for (int oy = 0; oy < Ho; ++oy) {
            double s = (oy + 0.5) * 0.5 - 0.5;
            double fl = std::floor(s);
            int y0 = std::clamp(static_cast<int>(fl), 0, H - 1);
            int y1 = std::clamp(static_cast<int>(fl) + 1, 0, H - 1);
            float fy = static_cast<float>(s - fl);
            const float* r0 = src + static_cast<int64_t>(y0) * W;
            const float* r1 = src + static_cast<int64_t>(y1) * W;
            float* out = dst + static_cast<int64_t>(oy) * Wo;
            for (int ox = 0; ox < Wo; ++ox) {
                float a = r0[x0[ox]] * (1.0f - fx[ox]) + r0[x1[ox]] * fx[ox];
                float b = r1[x0[ox]] * (1.0f - fx[ox]) + r1[x1[ox]] * fx[ox];
                out[ox] = a * (1.0f - fy) + b * fy;
            }
        }
    }
    return y;
}

Tensor upsample2x_backward(const Tensor& dy) {
    require_shape(dy.rank() == 4 && dy.dim(2) % 2 == 0 && dy.dim(3) % 2 == 0,
                  "upsample2x backward: upstream must have even spatial dims");
    const int N = static_cast<int>(dy.dim(0)), C = static_cast<int>(dy.dim(1));
    const int Ho = static_cast<int>(dy.dim(2)), Wo = static_cast<int>(dy.dim(3));
    const int H = Ho / 2, W = Wo / 2;
    Tensor dx({N, C, H, W});

    std::vector<int> x0(Wo), x1(Wo);
    std::vector<float> fx(Wo);
    for (int o = 0; o < Wo; ++o) {
        double s = (o + 0.5) * 0.5 - 0.5;
        double fl = std::floor(s);
        int i0 = static_cast<int>(fl);
        fx[o] = static_cast<float>(s - fl);
        x0[o] = std::clamp(i0, 0, W - 1);
        x1[o] = std::clamp(i0 + 1, 0, W - 1);
    }

    const int64_t planes = static_cast<int64_t>(N) * C;
#pragma omp parallel for schedule(static)
    for (int64_t pc = 0; pc < planes; ++pc) {
        const float* src = dy.data() + pc * static_cast<int64_t>(Ho) * Wo;
        float* dst = dx.data() + pc * H * W;
        for (int oy = 0; oy < Ho; ++oy) {
            double s = (oy + 0.5) * 0.5 - 0.5;
            double fl = std::floor(s);
            int y0 = std::clamp(static_cast<int>(fl), 0, H - 1);
            int y1 = std::clamp(static_cast<int>(fl) + 1, 0, H - 1);
            float fy = static_cast<float>(s - fl);
            const float* in = src + static_cast<int64_t>(oy) * Wo;
            for (int ox = 0; ox < Wo; ++ox) {
                float g = in[ox];
                dst[static_cast<int64_t>(y0) * W + x0[ox]] += g * (1.0f - fy) * (1.0f - fx[ox]);
                dst[static_cast<int64_t>(y0) * W + x1[ox]] += g * (1.0f - fy) * fx[ox];
                dst[static_cast<int64_t>(y1) * W + x0[ox]] += g * fy * (1.0f - fx[ox]);
                dst[static_cast<int64_t>(y1) * W + x1[ox]] += g * fy * fx[ox];
            }
        }
    }
    return dx;
}

Tensor pad2d_replicate_forward(const Tensor& x, int pad) {
    require_shape(x.rank() == 4 && pad >= 0, "pad2d: input must be NxCxHxW");
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
    const int Ho = H + 2 * pad, Wo = W + 2 * pad;
    Tensor y({N, C, Ho, Wo});
    const int64_t planes = static_cast<int64_t>(N) * C;
#pragma omp parallel for schedule(static)
    for (int64_t pc = 0; pc < planes; ++pc) {
        const float* src = x.data() + pc * H * W;
        float* dst = y.data() + pc * static_cast<int64_t>(Ho) * Wo;
        for (int oy = 0; oy < Ho; ++oy) {
            const int iy = std::clamp(oy - pad, 0, H - 1);
            for (int ox = 0; ox < Wo; ++ox) {
                const int ix = std::clamp(ox - pad, 0, W - 1);
                dst[static_cast<int64_t>(oy) * Wo + ox] = src[static_cast<int64_t>(iy) * W + ix];
            }
        }
    }
    return y;
}

Tensor pad2d_replicate_backward(const Tensor& dy, int pad) {
    require_shape(dy.rank() == 4 && dy.dim(2) > 2 * pad && dy.dim(3) > 2 * pad,
                  "pad2d backward: upstream too small");
    const int N = static_cast<int>(dy.dim(0)), C = static_cast<int>(dy.dim(1));
    const int Ho = static_cast<int>(dy.dim(2)), Wo = static_cast<int>(dy.dim(3));
    const int H = Ho - 2 * pad, W = Wo - 2 * pad;
    Tensor dx({N, C, H, W});
    const int64_t planes = static_cast<int64_t>(N) * C;
#pragma omp parallel for schedule(static)
    for (int64_t pc = 0; pc < planes; ++pc) {
        const float* src = dy.data() + pc * static_cast<int64_t>(Ho) * Wo;
        float* dst = dx.data() + pc * H * W;
        for (int oy = 0; oy < Ho; ++oy) {
            const int iy = std::clamp(oy - pad, 0, H - 1);
            for (int ox = 0; ox < Wo; ++ox) {
                const int ix = std::clamp(ox - pad, 0, W - 1);
                dst[static_cast<int64_t>(iy) * W + ix] += src[static_cast<int64_t>(oy) * Wo + ox];
            }
        }
    }
    return dx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    require_shape(a.rank() == 4 && b.rank() == 4 && a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) &&
                      a.dim(3) == b.dim(3),
                  "concat: spatial/batch dims must match");
    const int64_t N = a.dim(0), Ca = a.dim(1), Cb = b.dim(1), HW = a.dim(2) * a.dim(3);
    Tensor y({N, Ca + Cb, a.dim(2), a.dim(3)});
    for (int64_t n = 0; n < N; ++n) {
        std::copy(a.data() + n * Ca * HW, a.data() + (n + 1) * Ca * HW,
                  y.data() + n * (Ca + Cb) * HW);
        std::copy(b.data() + n * Cb * HW, b.data() + (n + 1) * Cb * HW,
                  y.data() + (n * (Ca + Cb) + Ca) * HW);
    }
    return y;
}

void concat_channels_backward(const Tensor& dy, int64_t ca, Tensor& da, Tensor& db) {
    const int64_t N = dy.dim(0), C = dy.dim(1), HW = dy.dim(2) * dy.dim(3);
    const int64_t cb = C - ca;
    da = Tensor({N, ca, dy.dim(2), dy.dim(3)});
    db = Tensor({N, cb, dy.dim(2), dy.dim(3)});
    for (int64_t n = 0; n < N; ++n) {
        std::copy(dy.data() + n * C * HW, dy.data() + (n * C + ca) * HW, da.data() + n * ca * HW);
        std::copy(dy.data() + (n * C + ca) * HW, dy.data() + (n + 1) * C * HW,
                  db.data() + n * cb * HW);
    }
}

double mse_loss(const Tensor& pred, const Tensor& target, const Tensor* mask) {
    require_shape(pred.same_shape(target), "mse: shape mismatch");
    if (mask) require_shape(mask->same_shape(pred), "mse: mask shape mismatch");
    double acc = 0.0;
    int64_t count = 0;
    for (int64_t i = 0; i < pred.numel(); ++i) {
        if (mask && (*mask)[i] == 0.0f) continue;
        double d = static_cast<double>(pred[i]) - target[i];
        acc += d * d;
        ++count;
    }
    require(count > 0, "mse: no unmasked entries");
    return acc / static_cast<double>(count);
}

Tensor mse_backward(const Tensor& pred, const Tensor& target, const Tensor* mask) {
    require_shape(pred.same_shape(target), "mse: shape mismatch");
    int64_t count = 0;
    if (mask) {
        for (int64_t i = 0; i < pred.numel(); ++i) count += (*mask)[i] != 0.0f;
    } else {
        count = pred.numel();
    }
    require(count > 0, "mse: no unmasked entries");
    Tensor d = Tensor::zeros_like(pred);
    const float scale = 2.0f / static_cast<float>(count);
    for (int64_t i = 0; i < pred.numel(); ++i) {
        if (mask && (*mask)[i] == 0.0f) continue;
        d[i] = scale * (pred[i] - target[i]);
    }
    return d;
}

namespace ref {

Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
    check_conv2d_shapes(x, w, stride, pad);
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
    const int F = static_cast<int>(w.dim(0)), kh = static_cast<int>(w.dim(2)),
              kw = static_cast<int>(w.dim(3));
    const int Ho = conv_out_size(H, kh, stride, pad);
    const int Wo = conv_out_size(W, kw, stride, pad);
    Tensor y({N, F, Ho, Wo});
    for (int n = 0; n < N; ++n)
        for (int f = 0; f < F; ++f)
            for (int oy = 0; oy < Ho; ++oy)
                for (int ox = 0; ox < Wo; ++ox) {
                    float acc = b[f];
                    for (int c = 0; c < C; ++c)
                        for (int ky = 0; ky < kh; ++ky)
                            for (int kx = 0; kx < kw; ++kx) {
                                int iy = oy * stride + ky - pad;
                                int ix = ox * stride + kx - pad;
                                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                                acc += x[((static_cast<int64_t>(n) * C + c) * H + iy) * W + ix] *
                                       w[((static_cast<int64_t>(f) * C + c) * kh + ky) * kw + kx];
                            }
                    y[((static_cast<int64_t>(n) * F + f) * Ho + oy) * Wo + ox] = acc;
                }
    return y;
}

Tensor conv3d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int sd, int sh, int sw,
                      int pd, int ph, int pw) {
    check_conv3d_shapes(x, w, sd, sh, sw, pd, ph, pw);
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int D = static_cast<int>(x.dim(2)), H = static_cast<int>(x.dim(3)),
              W = static_cast<int>(x.dim(4));
    const int F = static_cast<int>(w.dim(0)), kd = static_cast<int>(w.dim(2)),
              kh = static_cast<int>(w.dim(3)), kw = static_cast<int>(w.dim(4));
    const int Do = conv_out_size(D, kd, sd, pd);
    const int Ho = conv_out_size(H, kh, sh, ph);
    const int Wo = conv_out_size(W, kw, sw, pw);
    Tensor y({N, F, Do, Ho, Wo});
    for (int n = 0; n < N; ++n)
        for (int f = 0; f < F; ++f)
            for (int od = 0; od < Do; ++od)
                for (int oy = 0; oy < Ho; ++oy)
                    for (int ox = 0; ox < Wo; ++ox) {
                        float acc = b[f];
                        for (int c = 0; c < C; ++c)
                            for (int kz = 0; kz < kd; ++kz)
                                for (int ky = 0; ky < kh; ++ky)
                                    for (int kx = 0; kx < kw; ++kx) {
                                        int id = od * sd + kz - pd;
                                        int iy = oy * sh + ky - ph;
                                        int ix = ox * sw + kx - pw;
                                        if (id < 0 || id >= D || iy < 0 || iy >= H || ix < 0 ||
                                            ix >= W)
                                            continue;
                                        acc += x[(((static_cast<int64_t>(n) * C + c) * D + id) * H +
                                                  iy) *
                                                     W +
                                                 ix] *
                                               w[(((static_cast<int64_t>(f) * C + c) * kd + kz) *
                                                      kh +
                                                  ky) *
                                                     kw +
                                                 kx];
                                    }
                        y[(((static_cast<int64_t>(n) * F + f) * Do + od) * Ho + oy) * Wo + ox] =
                            acc;
                    }
    return y;
}

}  // namespace ref

}  // namespace p2p::nn
