// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "p2p/tensor.hpp"

namespace p2p::nn {

// Differentiable ops over batched tensors. Conventions:
//  - conv inputs are N x C x (D x) H x W, weights F x C x (kd x) kh x kw,
//    bias F; convolution is cross-correlation with zero padding.
//  - every backward matches central finite differences (see fdcheck.hpp).

Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad);

struct Conv2dGrads {
    Tensor dx, dw, db;
};
Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int stride,
                            int pad, bool need_dx = true);

Tensor conv3d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int sd, int sh, int sw,
                      int pd, int ph, int pw);

struct Conv3dGrads {
    Tensor dx, dw, db;
};
Conv3dGrads conv3d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int sd, int sh,
                            int sw, int pd, int ph, int pw, bool need_dx = true);

Tensor relu_forward(const Tensor& x);
// Gradient at x == 0 is defined as 0.
Tensor relu_backward(const Tensor& x, const Tensor& dy);

// Bilinear x2 upsampling, align_corners=false, edges clamped.
Tensor upsample2x_forward(const Tensor& x);
Tensor upsample2x_backward(const Tensor& dy);

// Edge-replicate padding (used by the pose network so that constant inputs
// stay constant through every layer).
Tensor pad2d_replicate_forward(const Tensor& x, int pad);
Tensor pad2d_replicate_backward(const Tensor& dy, int pad);

Tensor concat_channels(const Tensor& a, const Tensor& b);
void concat_channels_backward(const Tensor& dy, int64_t ca, Tensor& da, Tensor& db);

// Mean squared error over unmasked entries; mask (same shape, 0/1) optional.
double mse_loss(const Tensor& pred, const Tensor& target, const Tensor* mask = nullptr);
Tensor mse_backward(const Tensor& pred, const Tensor& target, const Tensor* mask = nullptr);

namespace ref {
// Direct-summation serial convolution, independent of the im2col/GEMM path.
Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad);
Tensor conv3d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int sd, int sh, int sw,
                      int pd, int ph, int pw);
}  // namespace ref

}  // namespace p2p::nn
