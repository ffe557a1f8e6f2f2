// SPDX-License-Identifier: Apache-2.0
// Compares the OpenMP kernels against the serial reference implementations
// on the layer shapes the two networks actually run.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "p2p/nn/kernels.hpp"
#include "p2p/nn/ops.hpp"
#include "p2p/rng.hpp"
#include "p2p/tensor.hpp"

using namespace p2p;
using namespace p2p::nn;

namespace {

Tensor random_tensor(std::vector<int64_t> shape, uint64_t seed) {
    Tensor t(std::move(shape));
    Pcg32 rng(seed);
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform_f(-1.0f, 1.0f);
    return t;
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

struct ConvCase {
    std::string name;
    int N, C, H, W, F, k, stride, pad;
};

void bench_conv(const ConvCase& cc) {
    Tensor x = random_tensor({cc.N, cc.C, cc.H, cc.W}, 1);
    Tensor w = random_tensor({cc.F, cc.C, cc.k, cc.k}, 2);
    Tensor b = random_tensor({cc.F}, 3);
    const int Ho = conv_out_size(cc.H, cc.k, cc.stride, cc.pad);
    const int Wo = conv_out_size(cc.W, cc.k, cc.stride, cc.pad);
    const double macs = 1.0 * cc.N * cc.F * Ho * Wo * cc.C * cc.k * cc.k;

    Tensor y_fast, y_ref;
    double t_fast = time_best_of(5, [&] { y_fast = conv2d_forward(x, w, b, cc.stride, cc.pad); });
    double t_ref = time_best_of(2, [&] { y_ref = ref::conv2d_forward(x, w, b, cc.stride, cc.pad); });

    double max_diff = 0.0;
    for (int64_t i = 0; i < y_fast.numel(); ++i)
        max_diff = std::max(max_diff, static_cast<double>(std::fabs(y_fast[i] - y_ref[i])));

    std::printf("%-24s %8.3f ms (omp, %6.2f GFLOP/s) | %8.3f ms (ref) | x%5.1f | maxdiff %.2e\n",
                cc.name.c_str(), t_fast * 1e3, 2.0 * macs / t_fast * 1e-9, t_ref * 1e3,
                t_ref / t_fast, max_diff);
}

void bench_gemm(const std::string& name, int64_t M, int64_t N, int64_t K) {
    std::vector<float> A(static_cast<size_t>(M * K)), B(static_cast<size_t>(K * N)),
        C(static_cast<size_t>(M * N));
    Pcg32 rng(7);
    for (float& v : A) v = rng.uniform_f(-1, 1);
    for (float& v : B) v = rng.uniform_f(-1, 1);

    double t_fast = time_best_of(7, [&] { sgemm(M, N, K, A.data(), B.data(), C.data(), false); });
    double t_ref =
        time_best_of(2, [&] { ref::sgemm(M, N, K, A.data(), B.data(), C.data(), false); });
    std::printf("%-24s %8.3f ms (omp, %6.2f GFLOP/s) | %8.3f ms (ref) | x%5.1f\n", name.c_str(),
                t_fast * 1e3, 2.0 * static_cast<double>(M) * N * K / t_fast * 1e-9, t_ref * 1e3,
                t_ref / t_fast);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) omp_set_num_threads(std::atoi(argv[1]));
    std::printf("threads: %d\n", omp_get_max_threads());

    std::printf("\n-- GEMM --\n");
    bench_gemm("gemm 320x16x2880", 320, 16, 2880);
    bench_gemm("gemm 320x2880x16", 320, 2880, 16);
    bench_gemm("gemm 64x64x1440", 64, 64, 1440);
    bench_gemm("gemm 24x1024x432", 24, 1024, 432);
    bench_gemm("gemm 512x512x512", 512, 512, 512);

    std::printf("\n-- conv2d layers --\n");
    bench_conv({"stem 1->16 @32", 16, 1, 32, 32, 16, 3, 1, 1});
    bench_conv({"enc 32->32 @16", 16, 32, 16, 16, 32, 3, 1, 1});
    bench_conv({"mid 320->320 @4", 16, 320, 4, 4, 320, 3, 1, 1});
    bench_conv({"dec 48->24 @32", 16, 48, 32, 32, 24, 3, 1, 1});
    bench_conv({"stage 24->24 @32", 16, 24, 32, 32, 24, 3, 1, 1});
    return 0;
}
