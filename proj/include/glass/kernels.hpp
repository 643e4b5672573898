#pragma once

// Data-parallel inner kernels. Every kernel here has a plain serial
// counterpart in reference.hpp that the tests compare against.
//
// Tensor layout throughout: channel-major (c, row, col), contiguous.

#include <span>

namespace glass::kernels {

// Half-pixel-centre bilinear resize of a (channels, in_h, in_w) raster.
void resize_bilinear(std::span<const float> src, int channels, int in_h, int in_w, std::span<float> dst,
                     int out_h, int out_w);

// 3x3 convolution, stride 1, zero padding 1 ("same"). weight is
// (cout, cin, 3, 3), bias is (cout). Lowered to im2col + GEMM.
template <class Real>
void conv3x3_forward(std::span<const Real> in, int cin, int h, int w, std::span<const Real> weight,
                     std::span<const Real> bias, int cout, std::span<Real> out);

// Accumulates into grad_weight and grad_bias. grad_in is overwritten; pass an
// empty span to skip the input gradient (first layer).
template <class Real>
void conv3x3_backward(std::span<const Real> in, int cin, int h, int w, std::span<const Real> weight, int cout,
                      std::span<const Real> grad_out, std::span<Real> grad_weight, std::span<Real> grad_bias,
                      std::span<Real> grad_in);

template <class Real>
void relu_inplace(std::span<Real> x);

// grad *= (activation > 0)
template <class Real>
void relu_backward(std::span<const Real> activation, std::span<Real> grad);

// 2x2 average pooling, stride 2. Output is (c, h/2, w/2) with floor; a
// trailing odd row or column is dropped.
template <class Real>
void avgpool2_forward(std::span<const Real> in, int c, int h, int w, std::span<Real> out);

// grad_in is overwritten (dropped rows/cols receive zero).
template <class Real>
void avgpool2_backward(std::span<const Real> grad_out, int c, int h, int w, std::span<Real> grad_in);

// Sum over all pixels of 1 - (1 - a_y * b_x / positions)^n, where a_y and b_x
// are row and column cover counts. Row partials are reduced in a fixed order,
// so the result does not depend on the thread count.
double coverage_sum(std::span<const int> row_counts, std::span<const int> col_counts, double positions, int n);

}  // namespace glass::kernels
