#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "prism/activations.hpp"
#include "prism/kernels.hpp"
#include "prism/tensor.hpp"
#include "prism/upsample.hpp"

namespace prism {

struct ConvLayer {
  std::size_t in_c = 1;
  ConvGeometry geometry;
  std::vector<float> weights;  // out_c × in_c × kh × kw
  std::vector<float> bias;     // out_c

  // Throws Errc::ShapeMismatch if weights/bias sizes disagree with the geometry.
  void validate() const;
};

struct ReluLayer {};

struct MaxPoolLayer {
  PoolGeometry geometry;
};

using LayerSpec = std::variant<ConvLayer, ReluLayer, MaxPoolLayer>;

std::string layer_kind(const LayerSpec& layer);

using Model = std::vector<LayerSpec>;

/// Cross-correlation with zero padding; output size ⌊(h + 2p − k)/s⌋ + 1.
Tensor4 conv2d(const Tensor4& input, const ConvLayer& layer);
Tensor4 relu(const Tensor4& input);
Tensor4 maxpool2d(const Tensor4& input, const PoolGeometry& pool);

/// Applies `model` to `input` without recording.
Tensor4 run_model(const Model& model, const Tensor4& input);

struct PrismOptions {
  SharpenOptions sharpen;
  SvdOptions svd;
};

/// Full map computation from a recorded stack: PCA of the deepest layer,
/// sharpening through the stack, then RGB normalization at (out_h, out_w).
RgbMapBatch compute_prism(const ActivationStack& stack, std::size_t out_h, std::size_t out_w,
                          const PrismOptions& options = {});

/// Explicit replacement for a global hook registry: owns a model and records
/// convolution outputs during forward passes while registered.
///
/// A session is single-owner. It may move between threads between calls but
/// must not be used concurrently.
class RecordingSession {
 public:
  explicit RecordingSession(Model model);

  void register_hooks() { recording_ = true; }
  void disable() { recording_ = false; }
  void prune() { stack_.clear(); }

  /// Runs every layer in order. While recording, each Conv output is appended
  /// to the stack, taken after the ReLU that immediately follows it if any.
  /// A shape problem raises Errc::ShapeMismatch naming the layer index.
  Tensor4 forward(const Tensor4& input);

  /// Computes the maps for the recorded batch and empties the stack.
  /// Errc::EmptyStack if nothing was recorded.
  RgbMapBatch get_maps(std::size_t out_h, std::size_t out_w, const PrismOptions& options = {});

  bool recording() const { return recording_; }
  const ActivationStack& stack() const { return stack_; }
  const Model& model() const { return model_; }

 private:
  Model model_;
  bool recording_ = false;
  ActivationStack stack_;
};

}  // namespace prism
