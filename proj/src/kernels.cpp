#include "glass/kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

namespace glass::kernels {
namespace {

struct AxisTap {
  int lo;
  int hi;
  float frac;
};

std::vector<AxisTap> bilinear_taps(int in, int out) {
  std::vector<AxisTap> taps(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int d = 0; d < out; ++d) {
    double s = (d + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(s));
    taps[d] = {lo, std::min(lo + 1, in - 1), static_cast<float>(s - lo)};
  }
  return taps;
}

template <class Real>
using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Real>
using ColVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
std::vector<Real>& scratch() {
  thread_local std::vector<Real> buf;
  return buf;
}

// col is (cin*9, h*w); row index ci*9 + ky*3 + kx.
template <class Real>
void im2col(const Real* in, int cin, int h, int w, Real* col) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
#pragma omp parallel for schedule(static) if (cin >= 16)
  for (int ci = 0; ci < cin; ++ci) {
    const Real* plane = in + ci * hw;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        Real* dst = col + (static_cast<std::size_t>(ci) * 9 + ky * 3 + kx) * hw;
        const int dx = kx - 1;
        const int x0 = std::max(0, -dx);
        const int x1 = std::min(w, w - dx);
        for (int y = 0; y < h; ++y) {
          Real* row = dst + static_cast<std::size_t>(y) * w;
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) {
            std::fill(row, row + w, Real(0));
            continue;
          }
          const Real* src = plane + static_cast<std::size_t>(sy) * w;
          std::fill(row, row + x0, Real(0));
          std::copy(src + x0 + dx, src + x1 + dx, row + x0);
          std::fill(row + x1, row + w, Real(0));
        }
      }
    }
  }
}

template <class Real>
void col2im(const Real* col, int cin, int h, int w, Real* grad_in) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  std::fill(grad_in, grad_in + cin * hw, Real(0));
#pragma omp parallel for schedule(static) if (cin >= 16)
  for (int ci = 0; ci < cin; ++ci) {
    Real* plane = grad_in + ci * hw;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const Real* src = col + (static_cast<std::size_t>(ci) * 9 + ky * 3 + kx) * hw;
        const int dx = kx - 1;
        const int x0 = std::max(0, -dx);
        const int x1 = std::min(w, w - dx);
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          const Real* row = src + static_cast<std::size_t>(y) * w;
          Real* dst = plane + static_cast<std::size_t>(sy) * w;
          for (int x = x0; x < x1; ++x) dst[x + dx] += row[x];
        }
      }
    }
  }
}

double int_pow(double base, int exp) {
  double result = 1.0;
  while (exp > 0) {
    if (exp & 1) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

}  // namespace

void resize_bilinear(std::span<const float> src, int channels, int in_h, int in_w, std::span<float> dst,
                     int out_h, int out_w) {
  const auto ytaps = bilinear_taps(in_h, out_h);
  const auto xtaps = bilinear_taps(in_w, out_w);
  const std::size_t in_plane = static_cast<std::size_t>(in_h) * in_w;
  const std::size_t out_plane = static_cast<std::size_t>(out_h) * out_w;
#pragma omp parallel for collapse(2) schedule(static)
  for (int c = 0; c < channels; ++c) {
    for (int oy = 0; oy < out_h; ++oy) {
      const AxisTap ty = ytaps[oy];
      const float* r0 = src.data() + c * in_plane + static_cast<std::size_t>(ty.lo) * in_w;
      const float* r1 = src.data() + c * in_plane + static_cast<std::size_t>(ty.hi) * in_w;
      float* out = dst.data() + c * out_plane + static_cast<std::size_t>(oy) * out_w;
      const float wy1 = ty.frac;
      const float wy0 = 1.0f - wy1;
      for (int ox = 0; ox < out_w; ++ox) {
        const AxisTap tx = xtaps[ox];
        const float wx1 = tx.frac;
        const float wx0 = 1.0f - wx1;
        const float top = wx0 * r0[tx.lo] + wx1 * r0[tx.hi];
        const float bottom = wx0 * r1[tx.lo] + wx1 * r1[tx.hi];
        out[ox] = wy0 * top + wy1 * bottom;
      }
    }
  }
}

template <class Real>
void conv3x3_forward(std::span<const Real> in, int cin, int h, int w, std::span<const Real> weight,
                     std::span<const Real> bias, int cout, std::span<Real> out) {
  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
  const Eigen::Index k = static_cast<Eigen::Index>(cin) * 9;
  auto& col = scratch<Real>();
  col.resize(static_cast<std::size_t>(k * hw));
  im2col(in.data(), cin, h, w, col.data());

  Eigen::Map<const RowMat<Real>> wmat(weight.data(), cout, k);
  Eigen::Map<const RowMat<Real>> cmat(col.data(), k, hw);
  Eigen::Map<RowMat<Real>> omat(out.data(), cout, hw);
  omat.noalias() = wmat * cmat;
  omat.colwise() += Eigen::Map<const ColVec<Real>>(bias.data(), cout);
}

template <class Real>
void conv3x3_backward(std::span<const Real> in, int cin, int h, int w, std::span<const Real> weight, int cout,
                      std::span<const Real> grad_out, std::span<Real> grad_weight, std::span<Real> grad_bias,
                      std::span<Real> grad_in) {
  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
  const Eigen::Index k = static_cast<Eigen::Index>(cin) * 9;
  auto& col = scratch<Real>();
  col.resize(static_cast<std::size_t>(k * hw));
  im2col(in.data(), cin, h, w, col.data());

  Eigen::Map<const RowMat<Real>> gout(grad_out.data(), cout, hw);
  Eigen::Map<const RowMat<Real>> cmat(col.data(), k, hw);
  Eigen::Map<RowMat<Real>> gw(grad_weight.data(), cout, k);
  gw.noalias() += gout * cmat.transpose();
  // Plain loop: Eigen's vectorised reduction peels by address, so its order would depend on heap alignment.
  for (int co = 0; co < cout; ++co) {
    const Real* g = grad_out.data() + co * hw;
    Real acc = 0;
    for (Eigen::Index i = 0; i < hw; ++i) acc += g[i];
    grad_bias[static_cast<std::size_t>(co)] += acc;
  }

  if (grad_in.empty()) return;
  Eigen::Map<const RowMat<Real>> wmat(weight.data(), cout, k);
  // col is no longer needed; reuse it for the column gradient.
  Eigen::Map<RowMat<Real>> gcol(col.data(), k, hw);
  gcol.noalias() = wmat.transpose() * gout;
  col2im(col.data(), cin, h, w, grad_in.data());
}

template <class Real>
void relu_inplace(std::span<Real> x) {
  const std::size_t n = x.size();
  Real* p = x.data();
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) p[i] = p[i] > Real(0) ? p[i] : Real(0);
}

template <class Real>
void relu_backward(std::span<const Real> activation, std::span<Real> grad) {
  const std::size_t n = grad.size();
  const Real* a = activation.data();
  Real* g = grad.data();
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) g[i] = a[i] > Real(0) ? g[i] : Real(0);
}

template <class Real>
void avgpool2_forward(std::span<const Real> in, int c, int h, int w, std::span<Real> out) {
  const int oh = h / 2;
  const int ow = w / 2;
  const std::size_t in_plane = static_cast<std::size_t>(h) * w;
  const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
#pragma omp parallel for schedule(static) if (c >= 16)
  for (int ch = 0; ch < c; ++ch) {
    const Real* src = in.data() + ch * in_plane;
    Real* dst = out.data() + ch * out_plane;
    for (int y = 0; y < oh; ++y) {
      const Real* r0 = src + static_cast<std::size_t>(2 * y) * w;
      const Real* r1 = r0 + w;
      Real* o = dst + static_cast<std::size_t>(y) * ow;
      for (int x = 0; x < ow; ++x) {
        o[x] = Real(0.25) * ((r0[2 * x] + r0[2 * x + 1]) + (r1[2 * x] + r1[2 * x + 1]));
      }
    }
  }
}

template <class Real>
void avgpool2_backward(std::span<const Real> grad_out, int c, int h, int w, std::span<Real> grad_in) {
  const int oh = h / 2;
  const int ow = w / 2;
  const std::size_t in_plane = static_cast<std::size_t>(h) * w;
  const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
  std::fill(grad_in.begin(), grad_in.end(), Real(0));
#pragma omp parallel for schedule(static) if (c >= 16)
  for (int ch = 0; ch < c; ++ch) {
    const Real* g = grad_out.data() + ch * out_plane;
    Real* dst = grad_in.data() + ch * in_plane;
    for (int y = 0; y < oh; ++y) {
      Real* r0 = dst + static_cast<std::size_t>(2 * y) * w;
      Real* r1 = r0 + w;
      const Real* gr = g + static_cast<std::size_t>(y) * ow;
      for (int x = 0; x < ow; ++x) {
        const Real v = Real(0.25) * gr[x];
        r0[2 * x] = v;
        r0[2 * x + 1] = v;
        r1[2 * x] = v;
        r1[2 * x + 1] = v;
      }
    }
  }
}

double coverage_sum(std::span<const int> row_counts, std::span<const int> col_counts, double positions, int n) {
  const auto rows = static_cast<std::ptrdiff_t>(row_counts.size());
  std::vector<double> partial(row_counts.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t y = 0; y < rows; ++y) {
    const double ay = row_counts[y] / positions;
    double acc = 0.0;
    for (int bx : col_counts) acc += 1.0 - int_pow(1.0 - ay * bx, n);
    partial[y] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

#define GLASS_INSTANTIATE(Real)                                                                                 \
  template void conv3x3_forward<Real>(std::span<const Real>, int, int, int, std::span<const Real>,             \
                                      std::span<const Real>, int, std::span<Real>);                            \
  template void conv3x3_backward<Real>(std::span<const Real>, int, int, int, std::span<const Real>, int,       \
                                       std::span<const Real>, std::span<Real>, std::span<Real>,                \
                                       std::span<Real>);                                                       \
  template void relu_inplace<Real>(std::span<Real>);                                                           \
  template void relu_backward<Real>(std::span<const Real>, std::span<Real>);                                   \
  template void avgpool2_forward<Real>(std::span<const Real>, int, int, int, std::span<Real>);                 \
  template void avgpool2_backward<Real>(std::span<const Real>, int, int, int, std::span<Real>);

GLASS_INSTANTIATE(float)
GLASS_INSTANTIATE(double)
#undef GLASS_INSTANTIATE

}  // namespace glass::kernels
