// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <vector>

#include "p2p/nn/fdcheck.hpp"
#include "p2p/nn/kernels.hpp"
#include "p2p/nn/ops.hpp"
#include "p2p/nn/optim.hpp"
#include "p2p/rng.hpp"

using namespace p2p;
using namespace p2p::nn;

namespace {

Tensor random_tensor(std::vector<int64_t> shape, uint64_t seed, float lo = -1.0f, float hi = 1.0f) {
    Tensor t(std::move(shape));
    Pcg32 rng(seed);
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform_f(lo, hi);
    return t;
}

// Test-side double-precision direct convolution, independent of the
// production im2col/GEMM path.
std::vector<double> conv2d_double(const Tensor& x, const Tensor& w, const Tensor& b, int stride,
                                  int pad) {
    const int N = static_cast<int>(x.dim(0)), C = static_cast<int>(x.dim(1));
    const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
    const int F = static_cast<int>(w.dim(0)), kh = static_cast<int>(w.dim(2)),
              kw = static_cast<int>(w.dim(3));
    const int Ho = (H + 2 * pad - kh) / stride + 1;
    const int Wo = (W + 2 * pad - kw) / stride + 1;
    std::vector<double> y(static_cast<size_t>(N) * F * Ho * Wo, 0.0);
    for (int n = 0; n < N; ++n)
        for (int f = 0; f < F; ++f)
            for (int oy = 0; oy < Ho; ++oy)
                for (int ox = 0; ox < Wo; ++ox) {
                    double acc = b[f];
                    for (int c = 0; c < C; ++c)
                        for (int ky = 0; ky < kh; ++ky)
                            for (int kx = 0; kx < kw; ++kx) {
                                int iy = oy * stride + ky - pad;
                                int ix = ox * stride + kx - pad;
                                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                                acc += static_cast<double>(
                                           x[((static_cast<int64_t>(n) * C + c) * H + iy) * W + ix]) *
                                       w[((static_cast<int64_t>(f) * C + c) * kh + ky) * kw + kx];
                            }
                    y[((static_cast<size_t>(n) * F + f) * Ho + oy) * Wo + ox] = acc;
                }
    return y;
}

}  // namespace

TEST_CASE("conv2d hand cases") {
    // 3x3 ones * 3x3 ones kernel, no padding -> 9.
    Tensor x({1, 1, 3, 3});
    x.fill(1.0f);
    Tensor w({1, 1, 3, 3});
    w.fill(1.0f);
    Tensor b({1});
    Tensor y = conv2d_forward(x, w, b, 1, 0);
    REQUIRE(y.numel() == 1);
    CHECK(y[0] == doctest::Approx(9.0f));

    // Identity 1x1 kernel.
    Tensor x2 = random_tensor({2, 3, 5, 4}, 9);
    Tensor w2({3, 3, 1, 1});
    for (int f = 0; f < 3; ++f)
        for (int c = 0; c < 3; ++c) w2[f * 3 + c] = (f == c) ? 1.0f : 0.0f;
    Tensor b2({3});
    Tensor y2 = conv2d_forward(x2, w2, b2, 1, 0);
    REQUIRE(y2.same_shape(x2));
    for (int64_t i = 0; i < x2.numel(); ++i) CHECK(y2[i] == x2[i]);

    CHECK_THROWS_AS(conv2d_forward(x, Tensor({1, 2, 3, 3}), b, 1, 0), ShapeError);
}

TEST_CASE("conv2d matches an independent double-precision oracle") {
    Tensor x = random_tensor({2, 3, 7, 6}, 11);
    Tensor w = random_tensor({4, 3, 3, 3}, 12);
    Tensor b = random_tensor({4}, 13);
    for (int stride : {1, 2}) {
        for (int pad : {0, 1}) {
            Tensor y = conv2d_forward(x, w, b, stride, pad);
            std::vector<double> oracle = conv2d_double(x, w, b, stride, pad);
            REQUIRE(static_cast<size_t>(y.numel()) == oracle.size());
            for (int64_t i = 0; i < y.numel(); ++i) {
                CHECK(y[i] == doctest::Approx(oracle[static_cast<size_t>(i)]).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("conv3d hand cases") {
    Tensor x({1, 1, 2, 2, 2});
    x.fill(1.0f);
    Tensor w({1, 1, 2, 2, 2});
    w.fill(1.0f);
    Tensor b({1});
    Tensor y = conv3d_forward(x, w, b, 1, 1, 1, 0, 0, 0);
    REQUIRE(y.numel() == 1);
    CHECK(y[0] == doctest::Approx(8.0f));

    // Delta kernel at the origin acts as identity.
    Tensor x2 = random_tensor({1, 1, 4, 3, 3}, 5);
    Tensor w2({1, 1, 1, 1, 1});
    w2[0] = 1.0f;
    Tensor y2 = conv3d_forward(x2, w2, b, 1, 1, 1, 0, 0, 0);
    for (int64_t i = 0; i < x2.numel(); ++i) CHECK(y2[i] == x2[i]);
}

TEST_CASE("conv forward agrees with the serial reference kernels") {
    Tensor x = random_tensor({2, 5, 9, 8}, 31);
    Tensor w = random_tensor({7, 5, 3, 3}, 32);
    Tensor b = random_tensor({7}, 33);
    Tensor fast = conv2d_forward(x, w, b, 2, 1);
    Tensor slow = ref::conv2d_forward(x, w, b, 2, 1);
    REQUIRE(fast.same_shape(slow));
    for (int64_t i = 0; i < fast.numel(); ++i)
        CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-5));

    Tensor x3 = random_tensor({1, 3, 10, 4, 4}, 41);
    Tensor w3 = random_tensor({6, 3, 7, 3, 3}, 42);
    Tensor b3 = random_tensor({6}, 43);
    Tensor fast3 = conv3d_forward(x3, w3, b3, 4, 1, 1, 2, 1, 1);
    Tensor slow3 = ref::conv3d_forward(x3, w3, b3, 4, 1, 1, 2, 1, 1);
    REQUIRE(fast3.same_shape(slow3));
    for (int64_t i = 0; i < fast3.numel(); ++i)
        CHECK(fast3[i] == doctest::Approx(slow3[i]).epsilon(1e-5));
}

TEST_CASE("gemm kernel agrees with the serial reference") {
    Pcg32 rng(55);
    for (auto [M, N, K] : std::vector<std::array<int64_t, 3>>{
             {1, 1, 1}, {4, 32, 16}, {5, 33, 17}, {13, 100, 231}, {64, 96, 50}, {7, 16, 300}}) {
        std::vector<float> A(static_cast<size_t>(M * K)), B(static_cast<size_t>(K * N));
        for (float& v : A) v = rng.uniform_f(-1, 1);
        for (float& v : B) v = rng.uniform_f(-1, 1);

        std::vector<float> C1(static_cast<size_t>(M * N), 0.5f), C2(static_cast<size_t>(M * N), 0.5f);
        sgemm(M, N, K, A.data(), B.data(), C1.data(), true);
        ref::sgemm(M, N, K, A.data(), B.data(), C2.data(), true);
        for (size_t i = 0; i < C1.size(); ++i)
            CHECK(C1[i] == doctest::Approx(C2[i]).epsilon(1e-4));
    }
}

TEST_CASE("results do not depend on the OpenMP worker count") {
    Tensor x = random_tensor({2, 4, 12, 12}, 71);
    Tensor w = random_tensor({8, 4, 3, 3}, 72);
    Tensor b = random_tensor({8}, 73);
    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    Tensor y1 = conv2d_forward(x, w, b, 1, 1);
    Tensor dy = random_tensor(y1.shape(), 74);
    Conv2dGrads g1 = conv2d_backward(x, w, dy, 1, 1);
    omp_set_num_threads(2);
    Tensor y2 = conv2d_forward(x, w, b, 1, 1);
    Conv2dGrads g2 = conv2d_backward(x, w, dy, 1, 1);
    omp_set_num_threads(saved);
    for (int64_t i = 0; i < y1.numel(); ++i) CHECK(y1[i] == y2[i]);
    for (int64_t i = 0; i < g1.dw.numel(); ++i) CHECK(g1.dw[i] == g2.dw[i]);
    for (int64_t i = 0; i < g1.dx.numel(); ++i) CHECK(g1.dx[i] == g2.dx[i]);
    for (int64_t i = 0; i < g1.db.numel(); ++i) CHECK(g1.db[i] == g2.db[i]);
}

TEST_CASE("conv linearity in the input") {
    Tensor x = random_tensor({1, 2, 6, 6}, 81);
    Tensor y = random_tensor({1, 2, 6, 6}, 82);
    Tensor w = random_tensor({3, 2, 3, 3}, 83);
    Tensor zero_bias({3});
    const float a = 0.7f, c = -1.3f;
    Tensor mix({1, 2, 6, 6});
    for (int64_t i = 0; i < mix.numel(); ++i) mix[i] = a * x[i] + c * y[i];
    Tensor lhs = conv2d_forward(mix, w, zero_bias, 1, 1);
    Tensor fx = conv2d_forward(x, w, zero_bias, 1, 1);
    Tensor fy = conv2d_forward(y, w, zero_bias, 1, 1);
    for (int64_t i = 0; i < lhs.numel(); ++i) {
        CHECK(lhs[i] == doctest::Approx(a * fx[i] + c * fy[i]).epsilon(1e-5));
    }
}

TEST_CASE("relu forward and backward") {
    Tensor x({3});
    x[0] = -1.0f;
    x[1] = 0.0f;
    x[2] = 2.0f;
    Tensor y = relu_forward(x);
    CHECK(y[0] == 0.0f);
    CHECK(y[1] == 0.0f);
    CHECK(y[2] == 2.0f);

    Tensor dy({3});
    dy.fill(1.0f);
    Tensor dx = relu_backward(x, dy);
    CHECK(dx[0] == 0.0f);
    CHECK(dx[1] == 0.0f);  // gradient at exactly 0 is defined as 0
    CHECK(dx[2] == 1.0f);

    Tensor pos = random_tensor({40}, 4, 0.1f, 2.0f);
    Tensor ypos = relu_forward(pos);
    for (int64_t i = 0; i < pos.numel(); ++i) CHECK(ypos[i] == pos[i]);
}

TEST_CASE("upsample hand cases") {
    Tensor c({1, 2, 3, 3});
    c.fill(4.25f);
    Tensor yc = upsample2x_forward(c);
    REQUIRE(yc.shape() == std::vector<int64_t>{1, 2, 6, 6});
    for (int64_t i = 0; i < yc.numel(); ++i) CHECK(yc[i] == 4.25f);

    Tensor one({1, 1, 1, 1});
    one[0] = -3.5f;
    Tensor y1 = upsample2x_forward(one);
    REQUIRE(y1.numel() == 4);
    for (int64_t i = 0; i < 4; ++i) CHECK(y1[i] == -3.5f);
}

TEST_CASE("pad replicate keeps constants constant") {
    Tensor c({2, 3, 4, 4});
    c.fill(1.25f);
    Tensor y = pad2d_replicate_forward(c, 1);
    REQUIRE(y.shape() == std::vector<int64_t>{2, 3, 6, 6});
    for (int64_t i = 0; i < y.numel(); ++i) CHECK(y[i] == 1.25f);
}

TEST_CASE("mse hand cases and gradient") {
    Tensor p({4});
    Tensor t({4});
    for (int i = 0; i < 4; ++i) p[i] = t[i] = 0.5f * i;
    CHECK(mse_loss(p, t) == doctest::Approx(0.0));

    Tensor p1({1}), t1({1});
    p1[0] = 2.0f;
    t1[0] = 0.0f;
    CHECK(mse_loss(p1, t1) == doctest::Approx(4.0));

    Tensor g = mse_backward(p1, t1);
    CHECK(g[0] == doctest::Approx(2.0f * (2.0f - 0.0f) / 1.0f));

    Tensor pr = random_tensor({10}, 3);
    Tensor tr = random_tensor({10}, 4);
    Tensor gr = mse_backward(pr, tr);
    for (int64_t i = 0; i < 10; ++i)
        CHECK(gr[i] == doctest::Approx(2.0f * (pr[i] - tr[i]) / 10.0f));

    Tensor mask({10});
    for (int i = 0; i < 10; ++i) mask[i] = i < 5 ? 1.0f : 0.0f;
    double masked = mse_loss(pr, tr, &mask);
    double manual = 0.0;
    for (int i = 0; i < 5; ++i) manual += (pr[i] - tr[i]) * (double)(pr[i] - tr[i]);
    CHECK(masked == doctest::Approx(manual / 5.0));
}

TEST_CASE("adam zero gradients leave parameters unchanged") {
    Parameter p("w", random_tensor({6}, 10));
    Tensor before = p.value;
    std::vector<Parameter*> params{&p};
    Adam opt;
    opt.step(params);
    for (int64_t i = 0; i < 6; ++i) CHECK(p.value[i] == before[i]);
}

TEST_CASE("adam first step is a signed lr-sized move") {
    Parameter p("w", Tensor({3}));
    p.value[0] = 1.0f;
    p.value[1] = -2.0f;
    p.value[2] = 0.5f;
    p.grad[0] = 0.3f;
    p.grad[1] = -0.9f;
    p.grad[2] = 1e-12f;
    std::vector<Parameter*> params{&p};
    Adam::Config cfg;
    cfg.lr = 0.001f;
    Adam opt(cfg);
    opt.step(params);
    // One step from zero moments: delta = -lr * g / (|g| + eps).
    CHECK(p.value[0] == doctest::Approx(1.0f - 0.001f).epsilon(1e-4));
    CHECK(p.value[1] == doctest::Approx(-2.0f + 0.001f).epsilon(1e-4));
    CHECK(std::fabs(p.value[2] - 0.5f) < 1e-3f);  // tiny gradient, eps-damped
}

TEST_CASE("adam runs are bit-identical") {
    auto run = [] {
        Parameter p("w", random_tensor({20}, 2));
        std::vector<Parameter*> params{&p};
        Adam opt;
        Pcg32 rng(9);
        for (int step = 0; step < 50; ++step) {
            for (int64_t i = 0; i < 20; ++i) p.grad[i] = rng.uniform_f(-1, 1);
            opt.step(params);
        }
        return p.value;
    };
    Tensor a = run(), b = run();
    for (int64_t i = 0; i < a.numel(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("finite differences confirm every backward pass") {
    const double tol = 1e-4;

    SUBCASE("conv2d input and weights") {
        Tensor x = random_tensor({1, 2, 5, 5}, 100, 0.1f, 1.0f);
        Tensor w = random_tensor({3, 2, 3, 3}, 101);
        Tensor b = random_tensor({3}, 102);
        FdReport rx = finite_difference_check(
            [&](const Tensor& xv) { return conv2d_forward(xv, w, b, 1, 1); },
            [&](const Tensor& xv, const Tensor& dy) {
                return conv2d_backward(xv, w, dy, 1, 1).dx;
            },
            x, tol, 1);
        CHECK_MESSAGE(rx.pass, rx.detail);

        FdReport rw = finite_difference_check(
            [&](const Tensor& wv) { return conv2d_forward(x, wv, b, 1, 1); },
            [&](const Tensor& wv, const Tensor& dy) {
                return conv2d_backward(x, wv, dy, 1, 1).dw;
            },
            w, tol, 2);
        CHECK_MESSAGE(rw.pass, rw.detail);

        FdReport rb = finite_difference_check(
            [&](const Tensor& bv) { return conv2d_forward(x, w, bv, 1, 1); },
            [&](const Tensor& bv, const Tensor& dy) {
                (void)bv;
                return conv2d_backward(x, w, dy, 1, 1).db;
            },
            b, tol, 3);
        CHECK_MESSAGE(rb.pass, rb.detail);
    }

    SUBCASE("conv3d input and weights") {
        Tensor x = random_tensor({1, 2, 6, 3, 3}, 110);
        Tensor w = random_tensor({2, 2, 3, 3, 3}, 111);
        Tensor b = random_tensor({2}, 112);
        FdReport rx = finite_difference_check(
            [&](const Tensor& xv) { return conv3d_forward(xv, w, b, 2, 1, 1, 1, 1, 1); },
            [&](const Tensor& xv, const Tensor& dy) {
                return conv3d_backward(xv, w, dy, 2, 1, 1, 1, 1, 1).dx;
            },
            x, tol, 4);
        CHECK_MESSAGE(rx.pass, rx.detail);

        FdReport rw = finite_difference_check(
            [&](const Tensor& wv) { return conv3d_forward(x, wv, b, 2, 1, 1, 1, 1, 1); },
            [&](const Tensor& wv, const Tensor& dy) {
                return conv3d_backward(x, wv, dy, 2, 1, 1, 1, 1, 1).dw;
            },
            w, tol, 5);
        CHECK_MESSAGE(rw.pass, rw.detail);
    }

    SUBCASE("relu away from the kink") {
        Tensor x = random_tensor({60}, 120);
        for (int64_t i = 0; i < x.numel(); ++i) {
            if (std::fabs(x[i]) < 0.1f) x[i] = x[i] < 0 ? -0.2f : 0.2f;
        }
        FdReport r = finite_difference_check(
            [](const Tensor& xv) { return relu_forward(xv); },
            [](const Tensor& xv, const Tensor& dy) { return relu_backward(xv, dy); }, x, tol, 6);
        CHECK_MESSAGE(r.pass, r.detail);
    }

    SUBCASE("upsample") {
        Tensor x = random_tensor({1, 2, 4, 5}, 130);
        FdReport r = finite_difference_check(
            [](const Tensor& xv) { return upsample2x_forward(xv); },
            [](const Tensor& xv, const Tensor& dy) {
                (void)xv;
                return upsample2x_backward(dy);
            },
            x, tol, 7);
        CHECK_MESSAGE(r.pass, r.detail);
    }

    SUBCASE("pad replicate") {
        Tensor x = random_tensor({1, 2, 4, 4}, 140);
        FdReport r = finite_difference_check(
            [](const Tensor& xv) { return pad2d_replicate_forward(xv, 1); },
            [](const Tensor& xv, const Tensor& dy) {
                (void)xv;
                return pad2d_replicate_backward(dy, 1);
            },
            x, tol, 8);
        CHECK_MESSAGE(r.pass, r.detail);
    }

    SUBCASE("mse as a one-element output op") {
        Tensor x = random_tensor({40}, 150);
        Tensor target = random_tensor({40}, 151);
        FdReport r = finite_difference_check(
            [&](const Tensor& xv) {
                Tensor out({1});
                out[0] = static_cast<float>(mse_loss(xv, target));
                return out;
            },
            [&](const Tensor& xv, const Tensor& dy) {
                Tensor g = mse_backward(xv, target);
                for (int64_t i = 0; i < g.numel(); ++i) g[i] *= dy[0];
                return g;
            },
            // mse is quadratic, so a large step is still exact and keeps the
            // numeric side well above float32 rounding of the scalar output.
            x, tol, 9, 0.5f);
        CHECK_MESSAGE(r.pass, r.detail);
    }

    SUBCASE("a corrupted backward fails the check") {
        Tensor x = random_tensor({1, 1, 4, 4}, 160);
        Tensor w = random_tensor({2, 1, 3, 3}, 161);
        Tensor b = random_tensor({2}, 162);
        FdReport r = finite_difference_check(
            [&](const Tensor& xv) { return conv2d_forward(xv, w, b, 1, 1); },
            [&](const Tensor& xv, const Tensor& dy) {
                Tensor dx = conv2d_backward(xv, w, dy, 1, 1).dx;
                dx[3] += 0.5f;  // deliberate corruption
                return dx;
            },
            x, tol, 10);
        CHECK(!r.pass);
    }
}

TEST_CASE("concat splits back exactly") {
    Tensor a = random_tensor({2, 3, 4, 4}, 170);
    Tensor b = random_tensor({2, 5, 4, 4}, 171);
    Tensor y = concat_channels(a, b);
    REQUIRE(y.shape() == std::vector<int64_t>{2, 8, 4, 4});
    Tensor da, db;
    concat_channels_backward(y, 3, da, db);
    for (int64_t i = 0; i < a.numel(); ++i) CHECK(da[i] == a[i]);
    for (int64_t i = 0; i < b.numel(); ++i) CHECK(db[i] == b[i]);
}
