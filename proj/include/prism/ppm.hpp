#pragma once

// Binary PPM (P6, maxval 255) image codec.

#include <cstddef>
#include <string>
#include <string_view>

#include "prism/tensor.hpp"
#include "prism/upsample.hpp"

namespace prism {

/// Decodes to shape (1, 3, H, W) with values byte/255. Header comments are
/// allowed. Errc::BadHeader or Errc::TruncatedPixels on malformed input.
Tensor4 read_image_ppm(std::string_view bytes);

/// Encodes image `index` of a map batch as `P6\n<W> <H>\n255\n` followed by
/// interleaved RGB bytes, each round(x·255) with halves rounded away from zero.
std::string write_image_ppm(const RgbMapBatch& maps, std::size_t index);

}  // namespace prism
