// Serial reference kernels. Kept deliberately plain: these are what the
// OpenMP kernels are tested and benchmarked against.

#include <algorithm>

#include "kernel_detail.hpp"
#include "prism/kernels.hpp"

namespace prism::reference {

void channel_sum(std::span<const float> in, const Shape4& s, std::span<float> out) {
  for (std::size_t b = 0; b < s.n; ++b) {
    for (std::size_t y = 0; y < s.h; ++y) {
      for (std::size_t x = 0; x < s.w; ++x) {
        double acc = 0.0;
        for (std::size_t ch = 0; ch < s.c; ++ch) {
          acc += in[((b * s.c + ch) * s.h + y) * s.w + x];
        }
        out[(b * s.h + y) * s.w + x] = static_cast<float>(acc);
      }
    }
  }
}

void bilinear_resize(std::span<const float> in, const Shape4& s, std::size_t out_h,
                     std::size_t out_w, std::span<float> out) {
  if (out_h == s.h && out_w == s.w) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  for (std::size_t pl = 0; pl < s.n * s.c; ++pl) {
    const float* src = in.data() + pl * s.plane();
    for (std::size_t y = 0; y < out_h; ++y) {
      const auto ys = detail::axis_sample(y, s.h, out_h);
      for (std::size_t x = 0; x < out_w; ++x) {
        const auto xs = detail::axis_sample(x, s.w, out_w);
        out[(pl * out_h + y) * out_w + x] = detail::bilinear_blend(src, s.w, ys, xs);
      }
    }
  }
}

void conv2d(std::span<const float> in, const Shape4& s, std::span<const float> weights,
            std::span<const float> bias, const ConvGeometry& g, std::span<float> out) {
  const std::size_t oh = g.out_h(s.h);
  const std::size_t ow = g.out_w(s.w);
  for (std::size_t b = 0; b < s.n; ++b) {
    for (std::size_t k = 0; k < g.out_c; ++k) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          double acc = 0.0;
          for (std::size_t ci = 0; ci < s.c; ++ci) {
            for (std::size_t ky = 0; ky < g.kh; ++ky) {
              for (std::size_t kx = 0; kx < g.kw; ++kx) {
                const long iy = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.padding);
                const long ix = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.padding);
                if (iy < 0 || ix < 0 || iy >= static_cast<long>(s.h) || ix >= static_cast<long>(s.w)) {
                  continue;  // zero padding
                }
                const float a = in[((b * s.c + ci) * s.h + static_cast<std::size_t>(iy)) * s.w +
                                   static_cast<std::size_t>(ix)];
                const float wv = weights[((k * s.c + ci) * g.kh + ky) * g.kw + kx];
                acc += static_cast<double>(a) * static_cast<double>(wv);
              }
            }
          }
          out[((b * g.out_c + k) * oh + oy) * ow + ox] =
              static_cast<float>(acc + static_cast<double>(bias[k]));
        }
      }
    }
  }
}

void maxpool2d(std::span<const float> in, const Shape4& s, const PoolGeometry& g,
               std::span<float> out) {
  const std::size_t oh = g.out_h(s.h);
  const std::size_t ow = g.out_w(s.w);
  for (std::size_t pl = 0; pl < s.n * s.c; ++pl) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        float best = in[pl * s.plane() + (oy * g.stride) * s.w + ox * g.stride];
        for (std::size_t ky = 0; ky < g.window; ++ky) {
          for (std::size_t kx = 0; kx < g.window; ++kx) {
            best = std::max(best, in[pl * s.plane() + (oy * g.stride + ky) * s.w + ox * g.stride + kx]);
          }
        }
        out[(pl * oh + oy) * ow + ox] = best;
      }
    }
  }
}

void relu(std::span<const float> in, std::span<float> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::max(in[i], 0.0f);
}

std::size_t rotate_pairs(const ColumnBlock& a, const ColumnBlock& v,
                         std::span<const ColumnPair> pairs, double tol) {
  std::size_t rotations = 0;
  for (const auto& [p, q] : pairs) {
    if (detail::rotate_pair(a, v, p, q, tol)) ++rotations;
  }
  return rotations;
}

}  // namespace prism::reference
