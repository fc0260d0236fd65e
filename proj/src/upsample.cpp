#include "prism/upsample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prism/error.hpp"
#include "prism/kernels.hpp"

namespace prism {

namespace {

void require_in_unit_range(const Tensor4& t) {
  for (float x : t.values()) {
    if (!(x >= 0.0f && x <= 1.0f)) {
      throw Error(Errc::InvalidArgument, "RGB map value " + std::to_string(x) + " outside [0, 1]");
    }
  }
}

// Divides each channel by its batch-wide max |value|; zero channels are left alone.
std::vector<float> divide_by_channel_max(const Tensor4& t, std::vector<float> data) {
  const auto peaks = channel_max_abs(t);
  const std::size_t plane = t.h() * t.w();
  for (std::size_t b = 0; b < t.n(); ++b) {
    for (std::size_t ch = 0; ch < t.c(); ++ch) {
      if (peaks[ch] == 0.0f) continue;
      float* p = data.data() + (b * t.c() + ch) * plane;
      for (std::size_t i = 0; i < plane; ++i) p[i] /= peaks[ch];
    }
  }
  return data;
}

}  // namespace

RgbMapBatch::RgbMapBatch(Tensor4 maps) : maps_(std::move(maps)) {
  if (maps_.c() != 3) {
    throw Error(Errc::ShapeMismatch, "RGB maps need 3 channels, got " + maps_.shape().str());
  }
  require_in_unit_range(maps_);
}

std::string_view to_string(SharpenMode mode) {
  return mode == SharpenMode::Progressive ? "progressive" : "last-only";
}

SharpenMode parse_sharpen_mode(std::string_view text) {
  if (text == "progressive") return SharpenMode::Progressive;
  if (text == "last-only") return SharpenMode::LastOnly;
  throw Error(Errc::InvalidArgument, "unknown sharpen mode '" + std::string(text) + "'");
}

Tensor4 bilinear_resize(const Tensor4& t, std::size_t out_h, std::size_t out_w) {
  if (out_h == 0 || out_w == 0) {
    throw Error(Errc::InvalidArgument, "resize target must be at least 1x1");
  }
  const Shape4 out_shape{t.n(), t.c(), out_h, out_w};
  std::vector<float> out(out_shape.count());
  kernels::bilinear_resize(t.values(), t.shape(), out_h, out_w, out);
  return Tensor4(out_shape, std::move(out));
}

std::vector<float> channel_max_abs(const Tensor4& t) {
  std::vector<float> peaks(t.c(), 0.0f);
  const std::size_t plane = t.h() * t.w();
  const auto src = t.values();
  for (std::size_t b = 0; b < t.n(); ++b) {
    for (std::size_t ch = 0; ch < t.c(); ++ch) {
      const float* p = src.data() + (b * t.c() + ch) * plane;
      for (std::size_t i = 0; i < plane; ++i) peaks[ch] = std::max(peaks[ch], std::abs(p[i]));
    }
  }
  return peaks;
}

Tensor4 progressive_sharpen(const Tensor4& scores, const ActivationStack& stack,
                            const SharpenOptions& options) {
  if (stack.empty()) throw Error(Errc::EmptyStack, "no recorded activations to sharpen with");
  const Tensor4& deepest = stack.deepest().activations;
  if (scores.h() != deepest.h() || scores.w() != deepest.w()) {
    throw Error(Errc::ShapeMismatch, "score maps " + scores.shape().str() +
                                         " do not match the deepest layer " + deepest.shape().str());
  }

  const std::size_t first =
      options.mode == SharpenMode::LastOnly ? stack.size() - 1 : 0;
  Tensor4 current = scores;
  for (std::size_t i = stack.size(); i-- > first;) {
    const RecordedLayer& layer = stack.layers()[i];
    const Tensor4& act = layer.activations;
    if (act.n() != scores.n()) {
      throw Error(Errc::ShapeMismatch, "layer " + std::to_string(i) + " ('" + layer.name +
                                           "') has batch " + std::to_string(act.n()) +
                                           ", scores have " + std::to_string(scores.n()));
    }
    const Tensor4 resized = bilinear_resize(current, act.h(), act.w());
    const Tensor4 sums = channel_sum(act);

    std::vector<float> data = resized.vector();
    const std::size_t plane = act.h() * act.w();
    const auto s = sums.values();
    for (std::size_t b = 0; b < resized.n(); ++b) {
      const float* mult = s.data() + b * plane;
      for (std::size_t ch = 0; ch < resized.c(); ++ch) {
        float* p = data.data() + (b * resized.c() + ch) * plane;
        for (std::size_t k = 0; k < plane; ++k) p[k] *= mult[k];
      }
    }
    Tensor4 product(resized.shape(), std::move(data));
    if (options.rescale_each_step) {
      current = Tensor4(product.shape(), divide_by_channel_max(product, product.vector()));
    } else {
      current = std::move(product);
    }
  }
  return current;
}

RgbMapBatch normalize_to_rgb(const Tensor4& m, std::size_t out_h, std::size_t out_w) {
  if (m.c() != 3) {
    throw Error(Errc::ShapeMismatch, "normalize_to_rgb needs 3 channels, got " + m.shape().str());
  }
  const Tensor4 resized = bilinear_resize(m, out_h, out_w);
  std::vector<float> data = divide_by_channel_max(resized, resized.vector());
  for (float& x : data) x = (std::clamp(x, -1.0f, 1.0f) + 1.0f) * 0.5f;
  return RgbMapBatch(Tensor4(resized.shape(), std::move(data)));
}

}  // namespace prism
