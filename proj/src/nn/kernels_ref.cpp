// SPDX-License-Identifier: Apache-2.0
#include "p2p/nn/kernels.hpp"

// Textbook serial kernels. Slow on purpose: they are the oracle the parallel
// implementations are tested and benchmarked against.

namespace p2p::nn::ref {

void sgemm(int64_t M, int64_t N, int64_t K, const float* A, const float* B, float* C,
           bool accumulate) {
    for (int64_t m = 0; m < M; ++m) {
        for (int64_t n = 0; n < N; ++n) {
            float acc = accumulate ? C[m * N + n] : 0.0f;
            for (int64_t k = 0; k < K; ++k) acc += A[m * K + k] * B[k * N + n];
            C[m * N + n] = acc;
        }
    }
}

}  // namespace p2p::nn::ref
