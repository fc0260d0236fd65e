#include "prism/kernels.hpp"

#include <algorithm>
#include <vector>

#include "kernel_detail.hpp"

namespace prism::kernels {

void channel_sum(std::span<const float> in, const Shape4& s, std::span<float> out) {
  const std::size_t plane = s.plane();
  const auto n = static_cast<std::ptrdiff_t>(s.n);
  const auto p = static_cast<std::ptrdiff_t>(plane);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t b = 0; b < n; ++b) {
    for (std::ptrdiff_t i = 0; i < p; ++i) {
      const float* base = in.data() + static_cast<std::size_t>(b) * s.c * plane;
      double acc = 0.0;
      for (std::size_t ch = 0; ch < s.c; ++ch) acc += base[ch * plane + static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(b) * plane + static_cast<std::size_t>(i)] = static_cast<float>(acc);
    }
  }
}

void bilinear_resize(std::span<const float> in, const Shape4& s, std::size_t out_h,
                     std::size_t out_w, std::span<float> out) {
  if (out_h == s.h && out_w == s.w) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  std::vector<detail::AxisSample> ys(out_h);
  std::vector<detail::AxisSample> xs(out_w);
  for (std::size_t y = 0; y < out_h; ++y) ys[y] = detail::axis_sample(y, s.h, out_h);
  for (std::size_t x = 0; x < out_w; ++x) xs[x] = detail::axis_sample(x, s.w, out_w);

  const auto planes = static_cast<std::ptrdiff_t>(s.n * s.c);
  const auto rows = static_cast<std::ptrdiff_t>(out_h);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t pl = 0; pl < planes; ++pl) {
    for (std::ptrdiff_t y = 0; y < rows; ++y) {
      const float* src = in.data() + static_cast<std::size_t>(pl) * s.plane();
      float* dst = out.data() + (static_cast<std::size_t>(pl) * out_h + static_cast<std::size_t>(y)) * out_w;
      for (std::size_t x = 0; x < out_w; ++x) {
        dst[x] = detail::bilinear_blend(src, s.w, ys[static_cast<std::size_t>(y)], xs[x]);
      }
    }
  }
}

void conv2d(std::span<const float> in, const Shape4& s, std::span<const float> weights,
            std::span<const float> bias, const ConvGeometry& g, std::span<float> out) {
  const std::size_t oh = g.out_h(s.h);
  const std::size_t ow = g.out_w(s.w);
  const auto n = static_cast<std::ptrdiff_t>(s.n);
  const auto oc = static_cast<std::ptrdiff_t>(g.out_c);
  const auto rows = static_cast<std::ptrdiff_t>(oh);
#pragma omp parallel for collapse(3) schedule(static)
  for (std::ptrdiff_t b = 0; b < n; ++b) {
    for (std::ptrdiff_t k = 0; k < oc; ++k) {
      for (std::ptrdiff_t oy = 0; oy < rows; ++oy) {
        const auto bb = static_cast<std::size_t>(b);
        const auto kk = static_cast<std::size_t>(k);
        const auto yy = static_cast<std::size_t>(oy);
        const float* kernel = weights.data() + kk * s.c * g.kh * g.kw;
        float* dst = out.data() + ((bb * g.out_c + kk) * oh + yy) * ow;
        for (std::size_t ox = 0; ox < ow; ++ox) {
          double acc = 0.0;
          for (std::size_t ci = 0; ci < s.c; ++ci) {
            const float* src = in.data() + (bb * s.c + ci) * s.plane();
            const float* wk = kernel + ci * g.kh * g.kw;
            for (std::size_t ky = 0; ky < g.kh; ++ky) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(yy * g.stride + ky) -
                                        static_cast<std::ptrdiff_t>(g.padding);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(s.h)) continue;
              for (std::size_t kx = 0; kx < g.kw; ++kx) {
                const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                                          static_cast<std::ptrdiff_t>(g.padding);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(s.w)) continue;
                acc += static_cast<double>(src[static_cast<std::size_t>(iy) * s.w + static_cast<std::size_t>(ix)]) *
                       static_cast<double>(wk[ky * g.kw + kx]);
              }
            }
          }
          dst[ox] = static_cast<float>(acc + static_cast<double>(bias[kk]));
        }
      }
    }
  }
}

void maxpool2d(std::span<const float> in, const Shape4& s, const PoolGeometry& g,
               std::span<float> out) {
  const std::size_t oh = g.out_h(s.h);
  const std::size_t ow = g.out_w(s.w);
  const auto planes = static_cast<std::ptrdiff_t>(s.n * s.c);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pl = 0; pl < planes; ++pl) {
    const float* src = in.data() + static_cast<std::size_t>(pl) * s.plane();
    float* dst = out.data() + static_cast<std::size_t>(pl) * oh * ow;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        float best = src[(oy * g.stride) * s.w + ox * g.stride];
        for (std::size_t ky = 0; ky < g.window; ++ky) {
          const float* row = src + (oy * g.stride + ky) * s.w + ox * g.stride;
          for (std::size_t kx = 0; kx < g.window; ++kx) best = std::max(best, row[kx]);
        }
        dst[oy * ow + ox] = best;
      }
    }
  }
}

void relu(std::span<const float> in, std::span<float> out) {
  const auto count = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = std::max(in[static_cast<std::size_t>(i)], 0.0f);
  }
}

std::size_t rotate_pairs(const ColumnBlock& a, const ColumnBlock& v,
                         std::span<const ColumnPair> pairs, double tol) {
  const auto count = static_cast<std::ptrdiff_t>(pairs.size());
  std::size_t rotations = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : rotations)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& [p, q] = pairs[static_cast<std::size_t>(i)];
    if (detail::rotate_pair(a, v, p, q, tol)) ++rotations;
  }
  return rotations;
}

}  // namespace prism::kernels
