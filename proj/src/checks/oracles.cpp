#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace prism::oracle {

Tensor64 widen(const Tensor4& t) {
  return {t.shape(), std::vector<double>(t.values().begin(), t.values().end())};
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += at(i, j) * at(i, j);
        if (i != j) off += at(i, j) * at(i, j);
      }
    }
    if (off <= 1e-30 * total || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A ← JᵀAJ with J the (p, q) rotation.
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

std::vector<double> gram(const ObservationMatrix& m) {
  const std::size_t c = m.cols();
  std::vector<double> g(c * c, 0.0);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < m.rows(); ++r) {
        acc += static_cast<double>(m.at(r, i)) * static_cast<double>(m.at(r, j));
      }
      g[i * c + j] = acc;
    }
  }
  return g;
}

std::vector<double> column_means(const ObservationMatrix& m) {
  std::vector<double> means(m.cols(), 0.0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) acc += m.at(r, j);
    means[j] = acc / static_cast<double>(m.rows());
  }
  return means;
}

Tensor64 channel_sum(const Tensor64& t) {
  const Shape4& s = t.shape;
  Tensor64 out{{s.n, 1, s.h, s.w}, std::vector<double>(s.n * s.h * s.w, 0.0)};
  for (std::size_t b = 0; b < s.n; ++b)
    for (std::size_t ch = 0; ch < s.c; ++ch)
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t x = 0; x < s.w; ++x) out.at(b, 0, y, x) += t.at(b, ch, y, x);
  return out;
}

Tensor64 conv2d(const Tensor64& in, const ConvLayer& layer) {
  const Shape4& s = in.shape;
  const auto& g = layer.geometry;
  const std::size_t oh = (s.h + 2 * g.padding - g.kh) / g.stride + 1;
  const std::size_t ow = (s.w + 2 * g.padding - g.kw) / g.stride + 1;
  Tensor64 out{{s.n, g.out_c, oh, ow}, std::vector<double>(s.n * g.out_c * oh * ow, 0.0)};
  for (std::size_t b = 0; b < s.n; ++b)
    for (std::size_t k = 0; k < g.out_c; ++k)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          double acc = layer.bias[k];
          for (std::size_t ci = 0; ci < s.c; ++ci)
            for (std::size_t ky = 0; ky < g.kh; ++ky)
              for (std::size_t kx = 0; kx < g.kw; ++kx) {
                const long y = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.padding);
                const long x = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.padding);
                if (y < 0 || x < 0 || y >= static_cast<long>(s.h) || x >= static_cast<long>(s.w)) continue;
                acc += in.at(b, ci, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) *
                       layer.weights[((k * s.c + ci) * g.kh + ky) * g.kw + kx];
              }
          out.at(b, k, oy, ox) = acc;
        }
  return out;
}

Tensor64 relu(const Tensor64& in) {
  Tensor64 out = in;
  for (double& x : out.data) x = x > 0.0 ? x : 0.0;
  return out;
}

Tensor64 maxpool2d(const Tensor64& in, const PoolGeometry& pool) {
  const Shape4& s = in.shape;
  const std::size_t oh = (s.h - pool.window) / pool.stride + 1;
  const std::size_t ow = (s.w - pool.window) / pool.stride + 1;
  Tensor64 out{{s.n, s.c, oh, ow}, std::vector<double>(s.n * s.c * oh * ow)};
  for (std::size_t b = 0; b < s.n; ++b)
    for (std::size_t ch = 0; ch < s.c; ++ch)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          double best = -INFINITY;
          for (std::size_t ky = 0; ky < pool.window; ++ky)
            for (std::size_t kx = 0; kx < pool.window; ++kx)
              best = std::max(best, in.at(b, ch, oy * pool.stride + ky, ox * pool.stride + kx));
          out.at(b, ch, oy, ox) = best;
        }
  return out;
}

Tensor64 bilinear_resize(const Tensor64& in, std::size_t out_h, std::size_t out_w) {
  const Shape4& s = in.shape;
  Tensor64 out{{s.n, s.c, out_h, out_w}, std::vector<double>(s.n * s.c * out_h * out_w)};
  // Source coordinate under the half-pixel-center rule, then the two taps
  // and the weight of the upper one.
  auto taps = [](std::size_t dst, std::size_t in_size, std::size_t out_size) {
    double src = (dst + 0.5) * static_cast<double>(in_size) / static_cast<double>(out_size) - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    const std::size_t hi = std::min(lo + 1, in_size - 1);
    return std::tuple{lo, hi, src - static_cast<double>(lo)};
  };
  for (std::size_t b = 0; b < s.n; ++b)
    for (std::size_t ch = 0; ch < s.c; ++ch)
      for (std::size_t y = 0; y < out_h; ++y)
        for (std::size_t x = 0; x < out_w; ++x) {
          const auto [y0, y1, fy] = taps(y, s.h, out_h);
          const auto [x0, x1, fx] = taps(x, s.w, out_w);
          out.at(b, ch, y, x) = (1 - fy) * (1 - fx) * in.at(b, ch, y0, x0) +
                                (1 - fy) * fx * in.at(b, ch, y0, x1) +
                                fy * (1 - fx) * in.at(b, ch, y1, x0) + fy * fx * in.at(b, ch, y1, x1);
        }
  return out;
}

Tensor64 forward(const Model& model, const Tensor64& input) {
  Tensor64 x = input;
  for (const auto& layer : model) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      x = conv2d(x, *conv);
    } else if (const auto* pool = std::get_if<MaxPoolLayer>(&layer)) {
      x = maxpool2d(x, pool->geometry);
    } else {
      x = relu(x);
    }
  }
  return x;
}

Tensor64 sharpen(const Tensor64& scores, const ActivationStack& stack, bool last_only) {
  Tensor64 cur = scores;
  const std::size_t first = last_only ? stack.size() - 1 : 0;
  for (std::size_t i = stack.size(); i-- > first;) {
    const Tensor64 act = widen(stack.layers()[i].activations);
    const Tensor64 sums = channel_sum(act);
    cur = bilinear_resize(cur, act.shape.h, act.shape.w);
    for (std::size_t b = 0; b < cur.shape.n; ++b)
      for (std::size_t ch = 0; ch < cur.shape.c; ++ch)
        for (std::size_t y = 0; y < cur.shape.h; ++y)
          for (std::size_t x = 0; x < cur.shape.w; ++x) cur.at(b, ch, y, x) *= sums.at(b, 0, y, x);
  }
  return cur;
}

Tensor64 channel_normalized(const Tensor64& t) {
  Tensor64 out = t;
  const Shape4& s = t.shape;
  for (std::size_t ch = 0; ch < s.c; ++ch) {
    double peak = 0.0;
    for (std::size_t b = 0; b < s.n; ++b)
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t x = 0; x < s.w; ++x) peak = std::max(peak, std::abs(t.at(b, ch, y, x)));
    if (peak == 0.0) continue;
    for (std::size_t b = 0; b < s.n; ++b)
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t x = 0; x < s.w; ++x) out.at(b, ch, y, x) /= peak;
  }
  return out;
}

double max_abs_diff(const Tensor64& a, const Tensor4& b) {
  if (!(a.shape == b.shape())) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    worst = std::max(worst, std::abs(a.data[i] - static_cast<double>(b.values()[i])));
  }
  return worst;
}

}  // namespace prism::oracle
