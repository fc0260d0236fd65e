#pragma once

// Per-element arithmetic shared by prism::kernels and prism::reference, so the
// parallel and serial versions evaluate identical floating-point sequences.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "prism/kernels.hpp"

namespace prism::detail {

// One axis of a half-pixel-center bilinear sample.
struct AxisSample {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double frac = 0.0;  // weight of `hi`
};

inline AxisSample axis_sample(std::size_t out_index, std::size_t in_size, std::size_t out_size) {
  const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
  const double src = std::max(0.0, (static_cast<double>(out_index) + 0.5) * scale - 0.5);
  AxisSample s;
  s.lo = static_cast<std::size_t>(src);
  if (s.lo >= in_size - 1) {
    s.lo = s.hi = in_size - 1;
    s.frac = 0.0;
  } else {
    s.hi = s.lo + 1;
    s.frac = src - static_cast<double>(s.lo);
  }
  return s;
}

inline float bilinear_blend(const float* plane, std::size_t w, const AxisSample& ys,
                            const AxisSample& xs) {
  const double v00 = plane[ys.lo * w + xs.lo];
  const double v01 = plane[ys.lo * w + xs.hi];
  const double v10 = plane[ys.hi * w + xs.lo];
  const double v11 = plane[ys.hi * w + xs.hi];
  const double top = (1.0 - xs.frac) * v00 + xs.frac * v01;
  const double bottom = (1.0 - xs.frac) * v10 + xs.frac * v11;
  return static_cast<float>((1.0 - ys.frac) * top + ys.frac * bottom);
}

// Hestenes rotation of one column pair. Returns true if a rotation was applied.
inline bool rotate_pair(const ColumnBlock& a, const ColumnBlock& v, std::size_t p, std::size_t q,
                        double tol) {
  double* ap = a.column(p);
  double* aq = a.column(q);
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  for (std::size_t i = 0; i < a.len; ++i) {
    alpha += ap[i] * ap[i];
    beta += aq[i] * aq[i];
    gamma += ap[i] * aq[i];
  }
  if (alpha == 0.0 || beta == 0.0) return false;
  if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) return false;

  const double zeta = (beta - alpha) / (2.0 * gamma);
  const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = c * t;

  for (std::size_t i = 0; i < a.len; ++i) {
    const double x = ap[i];
    const double y = aq[i];
    ap[i] = c * x - s * y;
    aq[i] = s * x + c * y;
  }
  double* vp = v.column(p);
  double* vq = v.column(q);
  for (std::size_t i = 0; i < v.len; ++i) {
    const double x = vp[i];
    const double y = vq[i];
    vp[i] = c * x - s * y;
    vq[i] = s * x + c * y;
  }
  return true;
}

}  // namespace prism::detail
