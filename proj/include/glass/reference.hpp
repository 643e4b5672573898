#pragma once

// Serial, loop-by-loop reference versions of the kernels in kernels.hpp.
// Slow on purpose; used only by tests and the benchmark.

#include <span>

namespace glass::reference {

void resize_bilinear(std::span<const float> src, int channels, int in_h, int in_w, std::span<float> dst,
                     int out_h, int out_w);

template <class Real>
void conv3x3_forward(std::span<const Real> in, int cin, int h, int w, std::span<const Real> weight,
                     std::span<const Real> bias, int cout, std::span<Real> out);

template <class Real>
void conv3x3_backward(std::span<const Real> in, int cin, int h, int w, std::span<const Real> weight, int cout,
                      std::span<const Real> grad_out, std::span<Real> grad_weight, std::span<Real> grad_bias,
                      std::span<Real> grad_in);

template <class Real>
void avgpool2_forward(std::span<const Real> in, int c, int h, int w, std::span<Real> out);

template <class Real>
void avgpool2_backward(std::span<const Real> grad_out, int c, int h, int w, std::span<Real> grad_in);

double coverage_sum(std::span<const int> row_counts, std::span<const int> col_counts, double positions, int n);

}  // namespace glass::reference
