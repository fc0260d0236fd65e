#pragma once

// Synthetic data for tests and the acceptance suite: random tensors and small
// random CNNs built from a seeded generator.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "prism/inference.hpp"
#include "prism/tensor.hpp"

namespace prism::toy {

using Rng = std::mt19937_64;

float uniform(Rng& rng, float lo, float hi);
std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive

Tensor4 random_tensor(Rng& rng, Shape4 shape, float lo = -1.0f, float hi = 1.0f);
ObservationMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, float lo = -1.0f,
                                float hi = 1.0f);

ConvLayer random_conv(Rng& rng, std::size_t in_c, std::size_t out_c, std::size_t k,
                      std::size_t stride, std::size_t padding);

/// conv3x3(pad 1) → relu → maxpool2 for each width, e.g. {8, 16}.
Model toy_model(Rng& rng, std::size_t in_c, std::span<const std::size_t> widths);
Model toy_model(Rng& rng);  // 3 → 8 → 16

/// A random valid architecture of at most `max_layers` layers for an input of
/// spatial size h×w with `in_c` channels. Always starts with a conv layer.
Model random_model(Rng& rng, std::size_t in_c, std::size_t h, std::size_t w, std::size_t max_layers);

/// Concatenates tensors along the batch axis.
Tensor4 concat_batch(std::span<const Tensor4> parts);
/// Image `i` of the result is image `perm[i]` of `t`.
Tensor4 permute_batch(const Tensor4& t, std::span<const std::size_t> perm);
Tensor4 slice_batch(const Tensor4& t, std::size_t index);

}  // namespace prism::toy
