#pragma once

// Raw data-parallel kernels behind the tensor, inference, upsampling and SVD
// operations. Every kernel here has a serial twin with the same signature in
// prism::reference; the two must agree bit for bit (each output element is
// produced by the same arithmetic sequence, only the loop schedule differs).
//
// Callers own shape validation and output allocation.

#include <cstddef>
#include <span>
#include <utility>

#include "prism/tensor.hpp"

namespace prism {

struct ConvGeometry {
  std::size_t out_c = 1;
  std::size_t kh = 1;
  std::size_t kw = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;

  std::size_t out_h(std::size_t h) const { return (h + 2 * padding - kh) / stride + 1; }
  std::size_t out_w(std::size_t w) const { return (w + 2 * padding - kw) / stride + 1; }
};

struct PoolGeometry {
  std::size_t window = 2;
  std::size_t stride = 2;

  std::size_t out_h(std::size_t h) const { return (h - window) / stride + 1; }
  std::size_t out_w(std::size_t w) const { return (w - window) / stride + 1; }
};

// Column-major double workspace for one-sided Jacobi: `cols` columns of
// `len` entries each, column j starting at j*len.
struct ColumnBlock {
  std::span<double> data;
  std::size_t len = 0;

  double* column(std::size_t j) const { return data.data() + j * len; }
};

using ColumnPair = std::pair<std::size_t, std::size_t>;

namespace kernels {

void channel_sum(std::span<const float> in, const Shape4& s, std::span<float> out);

void bilinear_resize(std::span<const float> in, const Shape4& s, std::size_t out_h,
                     std::size_t out_w, std::span<float> out);

void conv2d(std::span<const float> in, const Shape4& s, std::span<const float> weights,
            std::span<const float> bias, const ConvGeometry& g, std::span<float> out);

void maxpool2d(std::span<const float> in, const Shape4& s, const PoolGeometry& g,
               std::span<float> out);

void relu(std::span<const float> in, std::span<float> out);

// Orthogonalizes each (p, q) column pair of `a` with a plane rotation and
// applies the same rotation to `v`. Pairs within one call must be disjoint.
// A pair is skipped when |a_p·a_q| <= tol·|a_p|·|a_q|. Returns the number of
// rotations applied.
std::size_t rotate_pairs(const ColumnBlock& a, const ColumnBlock& v,
                         std::span<const ColumnPair> pairs, double tol);

}  // namespace kernels

namespace reference {

void channel_sum(std::span<const float> in, const Shape4& s, std::span<float> out);

void bilinear_resize(std::span<const float> in, const Shape4& s, std::size_t out_h,
                     std::size_t out_w, std::span<float> out);

void conv2d(std::span<const float> in, const Shape4& s, std::span<const float> weights,
            std::span<const float> bias, const ConvGeometry& g, std::span<float> out);

void maxpool2d(std::span<const float> in, const Shape4& s, const PoolGeometry& g,
               std::span<float> out);

void relu(std::span<const float> in, std::span<float> out);

std::size_t rotate_pairs(const ColumnBlock& a, const ColumnBlock& v,
                         std::span<const ColumnPair> pairs, double tol);

}  // namespace reference

}  // namespace prism
