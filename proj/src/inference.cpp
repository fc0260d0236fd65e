#include "prism/inference.hpp"

#include <string>

#include "prism/error.hpp"
#include "prism/pca.hpp"

namespace prism {

void ConvLayer::validate() const {
  const auto& g = geometry;
  if (in_c == 0 || g.out_c == 0 || g.kh == 0 || g.kw == 0 || g.stride == 0) {
    throw Error(Errc::ShapeMismatch, "conv layer needs non-zero channels, kernel size and stride");
  }
  if (weights.size() != g.out_c * in_c * g.kh * g.kw) {
    throw Error(Errc::ShapeMismatch,
                "conv weights hold " + std::to_string(weights.size()) + " values, expected " +
                    std::to_string(g.out_c) + "x" + std::to_string(in_c) + "x" +
                    std::to_string(g.kh) + "x" + std::to_string(g.kw));
  }
  if (bias.size() != g.out_c) {
    throw Error(Errc::ShapeMismatch, "conv bias holds " + std::to_string(bias.size()) +
                                         " values, expected " + std::to_string(g.out_c));
  }
}

std::string layer_kind(const LayerSpec& layer) {
  struct {
    std::string operator()(const ConvLayer&) const { return "conv"; }
    std::string operator()(const ReluLayer&) const { return "relu"; }
    std::string operator()(const MaxPoolLayer&) const { return "maxpool"; }
  } visitor;
  return std::visit(visitor, layer);
}

Tensor4 conv2d(const Tensor4& input, const ConvLayer& layer) {
  layer.validate();
  const auto& g = layer.geometry;
  if (input.c() != layer.in_c) {
    throw Error(Errc::ShapeMismatch, "conv expects " + std::to_string(layer.in_c) +
                                         " input channels, got " + std::to_string(input.c()));
  }
  if (input.h() + 2 * g.padding < g.kh || input.w() + 2 * g.padding < g.kw) {
    throw Error(Errc::ShapeMismatch, "conv kernel " + std::to_string(g.kh) + "x" +
                                         std::to_string(g.kw) + " larger than padded input " +
                                         input.shape().str());
  }
  const Shape4 out_shape{input.n(), g.out_c, g.out_h(input.h()), g.out_w(input.w())};
  std::vector<float> out(out_shape.count());
  kernels::conv2d(input.values(), input.shape(), layer.weights, layer.bias, g, out);
  return Tensor4(out_shape, std::move(out));
}

Tensor4 relu(const Tensor4& input) {
  std::vector<float> out(input.size());
  kernels::relu(input.values(), out);
  return Tensor4(input.shape(), std::move(out));
}

Tensor4 maxpool2d(const Tensor4& input, const PoolGeometry& pool) {
  if (pool.window == 0 || pool.stride == 0) {
    throw Error(Errc::ShapeMismatch, "maxpool needs window and stride >= 1");
  }
  if (pool.window > input.h() || pool.window > input.w()) {
    throw Error(Errc::ShapeMismatch, "maxpool window " + std::to_string(pool.window) +
                                         " larger than input " + input.shape().str());
  }
  const Shape4 out_shape{input.n(), input.c(), pool.out_h(input.h()), pool.out_w(input.w())};
  std::vector<float> out(out_shape.count());
  kernels::maxpool2d(input.values(), input.shape(), pool, out);
  return Tensor4(out_shape, std::move(out));
}

namespace {

Tensor4 apply_layer(const LayerSpec& layer, const Tensor4& x, std::size_t index) {
  try {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) return conv2d(x, *conv);
    if (std::holds_alternative<ReluLayer>(layer)) return relu(x);
    return maxpool2d(x, std::get<MaxPoolLayer>(layer).geometry);
  } catch (const Error& e) {
    throw Error(e.code(), "layer " + std::to_string(index) + " (" + layer_kind(layer) + "): " + e.detail());
  }
}

}  // namespace

Tensor4 run_model(const Model& model, const Tensor4& input) {
  Tensor4 x = input;
  for (std::size_t i = 0; i < model.size(); ++i) x = apply_layer(model[i], x, i);
  return x;
}

RgbMapBatch compute_prism(const ActivationStack& stack, std::size_t out_h, std::size_t out_w,
                          const PrismOptions& options) {
  if (stack.empty()) throw Error(Errc::EmptyStack, "no forward pass has been recorded");
  const Tensor4& deepest = stack.deepest().activations;
  const auto centered = center_columns(reshape_to_observations(deepest));
  const ScoreMaps scores = principal_scores(centered.centered, 3, options.svd);
  const Tensor4 sharpened = progressive_sharpen(scores, stack, options.sharpen);
  return normalize_to_rgb(sharpened, out_h, out_w);
}

RecordingSession::RecordingSession(Model model) : model_(std::move(model)) {
  for (const auto& layer : model_) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) conv->validate();
  }
}

Tensor4 RecordingSession::forward(const Tensor4& input) {
  // Collected locally so a failing pass leaves the stack untouched.
  std::vector<RecordedLayer> recorded;
  Tensor4 x = input;
  for (std::size_t i = 0; i < model_.size(); ++i) {
    x = apply_layer(model_[i], x, i);
    if (!recording_ || !std::holds_alternative<ConvLayer>(model_[i])) continue;
    std::string name = "layer" + std::to_string(i) + ".conv";
    if (i + 1 < model_.size() && std::holds_alternative<ReluLayer>(model_[i + 1])) {
      ++i;
      x = apply_layer(model_[i], x, i);
      name += "+relu";
    }
    recorded.push_back({std::move(name), x});
  }
  for (auto& layer : recorded) stack_.push(std::move(layer.name), std::move(layer.activations));
  return x;
}

RgbMapBatch RecordingSession::get_maps(std::size_t out_h, std::size_t out_w,
                                       const PrismOptions& options) {
  if (stack_.empty()) throw Error(Errc::EmptyStack, "get_maps called with no recorded activations");
  ActivationStack taken;
  std::swap(taken, stack_);
  return compute_prism(taken, out_h, out_w, options);
}

}  // namespace prism
