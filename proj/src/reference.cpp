#include "glass/reference.hpp"

#include <algorithm>
#include <cmath>

namespace glass::reference {

void resize_bilinear(std::span<const float> src, int channels, int in_h, int in_w, std::span<float> dst,
                     int out_h, int out_w) {
  for (int c = 0; c < channels; ++c) {
    for (int oy = 0; oy < out_h; ++oy) {
      double sy = (oy + 0.5) * in_h / out_h - 0.5;
      sy = std::clamp(sy, 0.0, in_h - 1.0);
      const int y0 = static_cast<int>(std::floor(sy));
      const int y1 = std::min(y0 + 1, in_h - 1);
      const double fy = sy - y0;
      for (int ox = 0; ox < out_w; ++ox) {
        double sx = (ox + 0.5) * in_w / out_w - 0.5;
        sx = std::clamp(sx, 0.0, in_w - 1.0);
        const int x0 = static_cast<int>(std::floor(sx));
        const int x1 = std::min(x0 + 1, in_w - 1);
        const double fx = sx - x0;
        auto px = [&](int y, int x) { return static_cast<double>(src[(c * in_h + y) * in_w + x]); };
        const double v = (1 - fy) * ((1 - fx) * px(y0, x0) + fx * px(y0, x1)) +
                         fy * ((1 - fx) * px(y1, x0) + fx * px(y1, x1));
        dst[(c * out_h + oy) * out_w + ox] = static_cast<float>(v);
      }
    }
  }
}

template <class Real>
void conv3x3_forward(std::span<const Real> in, int cin, int h, int w, std::span<const Real> weight,
                     std::span<const Real> bias, int cout, std::span<Real> out) {
  for (int co = 0; co < cout; ++co) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        Real acc = bias[co];
        for (int ci = 0; ci < cin; ++ci) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              const int sy = y + ky - 1;
              const int sx = x + kx - 1;
              if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
              acc += weight[((co * cin + ci) * 3 + ky) * 3 + kx] * in[(ci * h + sy) * w + sx];
            }
          }
        }
        out[(co * h + y) * w + x] = acc;
      }
    }
  }
}

template <class Real>
void conv3x3_backward(std::span<const Real> in, int cin, int h, int w, std::span<const Real> weight, int cout,
                      std::span<const Real> grad_out, std::span<Real> grad_weight, std::span<Real> grad_bias,
                      std::span<Real> grad_in) {
  if (!grad_in.empty()) std::fill(grad_in.begin(), grad_in.end(), Real(0));
  for (int co = 0; co < cout; ++co) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Real g = grad_out[(co * h + y) * w + x];
        grad_bias[co] += g;
        for (int ci = 0; ci < cin; ++ci) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              const int sy = y + ky - 1;
              const int sx = x + kx - 1;
              if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
              const int widx = ((co * cin + ci) * 3 + ky) * 3 + kx;
              const int iidx = (ci * h + sy) * w + sx;
              grad_weight[widx] += g * in[iidx];
              if (!grad_in.empty()) grad_in[iidx] += g * weight[widx];
            }
          }
        }
      }
    }
  }
}

template <class Real>
void avgpool2_forward(std::span<const Real> in, int c, int h, int w, std::span<Real> out) {
  const int oh = h / 2;
  const int ow = w / 2;
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        Real s = 0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) s += in[(ch * h + 2 * y + dy) * w + 2 * x + dx];
        out[(ch * oh + y) * ow + x] = s / 4;
      }
}

template <class Real>
void avgpool2_backward(std::span<const Real> grad_out, int c, int h, int w, std::span<Real> grad_in) {
  const int oh = h / 2;
  const int ow = w / 2;
  std::fill(grad_in.begin(), grad_in.end(), Real(0));
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x)
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx)
            grad_in[(ch * h + 2 * y + dy) * w + 2 * x + dx] = grad_out[(ch * oh + y) * ow + x] / 4;
}

double coverage_sum(std::span<const int> row_counts, std::span<const int> col_counts, double positions, int n) {
  double total = 0.0;
  for (int ay : row_counts) {
    for (int bx : col_counts) {
      const double p = static_cast<double>(ay) * bx / positions;
      double miss = 1.0;
      for (int i = 0; i < n; ++i) miss *= 1.0 - p;
      total += 1.0 - miss;
    }
  }
  return total;
}

template void conv3x3_forward<float>(std::span<const float>, int, int, int, std::span<const float>,
                                     std::span<const float>, int, std::span<float>);
template void conv3x3_forward<double>(std::span<const double>, int, int, int, std::span<const double>,
                                      std::span<const double>, int, std::span<double>);
template void conv3x3_backward<float>(std::span<const float>, int, int, int, std::span<const float>, int,
                                      std::span<const float>, std::span<float>, std::span<float>,
                                      std::span<float>);
template void conv3x3_backward<double>(std::span<const double>, int, int, int, std::span<const double>, int,
                                       std::span<const double>, std::span<double>, std::span<double>,
                                       std::span<double>);
template void avgpool2_forward<float>(std::span<const float>, int, int, int, std::span<float>);
template void avgpool2_forward<double>(std::span<const double>, int, int, int, std::span<double>);
template void avgpool2_backward<float>(std::span<const float>, int, int, int, std::span<float>);
template void avgpool2_backward<double>(std::span<const double>, int, int, int, std::span<double>);

}  // namespace glass::reference
