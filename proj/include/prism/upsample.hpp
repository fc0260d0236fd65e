#pragma once

#include <cstddef>
#include <string_view>

#include "prism/activations.hpp"
#include "prism/pca.hpp"
#include "prism/tensor.hpp"

namespace prism {

/// Final colour mask batch: shape (n, 3, H, W), every value in [0, 1].
class RgbMapBatch {
 public:
  explicit RgbMapBatch(Tensor4 maps);

  const Tensor4& maps() const { return maps_; }
  std::size_t n() const { return maps_.n(); }
  std::size_t height() const { return maps_.h(); }
  std::size_t width() const { return maps_.w(); }

 private:
  Tensor4 maps_;
};

enum class SharpenMode {
  Progressive,  // multiply by the channel sum of every recorded layer, deepest first
  LastOnly,     // multiply by the deepest layer's channel sum only
};

std::string_view to_string(SharpenMode mode);
// Accepts "progressive" and "last-only".
SharpenMode parse_sharpen_mode(std::string_view text);

/// Half-pixel-center bilinear resize of every (n, c) plane. Source sample for
/// output (Y, X) is ((Y+0.5)·h/H − 0.5, (X+0.5)·w/W − 0.5), clamped to the
/// valid range. Same-size resize returns the input unchanged.
Tensor4 bilinear_resize(const Tensor4& t, std::size_t out_h, std::size_t out_w);

struct SharpenOptions {
  SharpenMode mode = SharpenMode::Progressive;
  // Divide each channel by its batch-wide max |value| after every layer. This
  // only keeps magnitudes in range; normalize_to_rgb removes any positive
  // per-channel scale anyway.
  bool rescale_each_step = true;
};

/// Walks the stack from the deepest layer to the shallowest: resize the score
/// maps to the layer's spatial size, then multiply by that layer's channel
/// sum (broadcast over the score channels).
///
/// `scores` must have the deepest layer's spatial size and the stack's batch
/// size (Errc::ShapeMismatch otherwise). An empty stack is Errc::EmptyStack.
Tensor4 progressive_sharpen(const Tensor4& scores, const ActivationStack& stack,
                            const SharpenOptions& options = {});
inline Tensor4 progressive_sharpen(const ScoreMaps& scores, const ActivationStack& stack,
                                   const SharpenOptions& options = {}) {
  return progressive_sharpen(scores.scores, stack, options);
}

/// Resize to (H, W), divide each channel by its batch-wide max |value| (zero
/// channels stay zero), clip to [−1, 1] and map x ↦ (x + 1) / 2.
RgbMapBatch normalize_to_rgb(const Tensor4& m, std::size_t out_h, std::size_t out_w);

// Per-channel maximum |value| across the whole batch.
std::vector<float> channel_max_abs(const Tensor4& t);

}  // namespace prism
