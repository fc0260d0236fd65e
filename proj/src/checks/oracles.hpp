#pragma once

// Independent double-precision oracles. These are written from the textbook
// definitions and share no code with the library's kernels; tests and the
// acceptance suite compare the library against them.

#include <cstddef>
#include <vector>

#include "prism/activations.hpp"
#include "prism/inference.hpp"
#include "prism/tensor.hpp"

namespace prism::oracle {

// Dense double tensor in (n, c, h, w) order.
struct Tensor64 {
  Shape4 shape;
  std::vector<double> data;

  double& at(std::size_t b, std::size_t ch, std::size_t y, std::size_t x) {
    return data[((b * shape.c + ch) * shape.h + y) * shape.w + x];
  }
  double at(std::size_t b, std::size_t ch, std::size_t y, std::size_t x) const {
    return data[((b * shape.c + ch) * shape.h + y) * shape.w + x];
  }
};

Tensor64 widen(const Tensor4& t);

// Eigenvalues of a symmetric n×n row-major matrix by cyclic two-sided Jacobi,
// sorted in decreasing order.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n);

// AᵀA for a row-major rows×cols matrix.
std::vector<double> gram(const ObservationMatrix& m);

std::vector<double> column_means(const ObservationMatrix& m);

Tensor64 channel_sum(const Tensor64& t);
Tensor64 conv2d(const Tensor64& in, const ConvLayer& layer);
Tensor64 relu(const Tensor64& in);
Tensor64 maxpool2d(const Tensor64& in, const PoolGeometry& pool);
Tensor64 bilinear_resize(const Tensor64& in, std::size_t out_h, std::size_t out_w);

// Layer-by-layer model evaluation.
Tensor64 forward(const Model& model, const Tensor64& input);

// Resize-and-multiply through the stack (deepest to shallowest, or the
// deepest layer only), with no intermediate rescaling.
Tensor64 sharpen(const Tensor64& scores, const ActivationStack& stack, bool last_only);

// Divides each channel by its batch-wide max |value| (zero channels untouched).
Tensor64 channel_normalized(const Tensor64& t);

double max_abs_diff(const Tensor64& a, const Tensor4& b);

}  // namespace prism::oracle
