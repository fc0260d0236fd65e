#include "toy.hpp"

#include <algorithm>
#include <cmath>

namespace prism::toy {

float uniform(Rng& rng, float lo, float hi) {
  return std::uniform_real_distribution<float>(lo, hi)(rng);
}

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Tensor4 random_tensor(Rng& rng, Shape4 shape, float lo, float hi) {
  std::vector<float> data(shape.count());
  for (float& x : data) x = uniform(rng, lo, hi);
  return Tensor4(shape, std::move(data));
}

ObservationMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, float lo, float hi) {
  std::vector<float> data(rows * cols);
  for (float& x : data) x = uniform(rng, lo, hi);
  return ObservationMatrix(rows, cols, std::move(data));
}

ConvLayer random_conv(Rng& rng, std::size_t in_c, std::size_t out_c, std::size_t k,
                      std::size_t stride, std::size_t padding) {
  ConvLayer conv;
  conv.in_c = in_c;
  conv.geometry = {out_c, k, k, stride, padding};
  // He-style scale keeps activations O(1) through a few layers.
  const float scale = std::sqrt(2.0f / static_cast<float>(in_c * k * k));
  conv.weights.resize(out_c * in_c * k * k);
  for (float& w : conv.weights) w = uniform(rng, -scale, scale) * 1.7f;
  conv.bias.resize(out_c);
  for (float& b : conv.bias) b = uniform(rng, -0.1f, 0.1f);
  return conv;
}

Model toy_model(Rng& rng, std::size_t in_c, std::span<const std::size_t> widths) {
  Model m;
  std::size_t c = in_c;
  for (std::size_t width : widths) {
    m.emplace_back(random_conv(rng, c, width, 3, 1, 1));
    m.emplace_back(ReluLayer{});
    m.emplace_back(MaxPoolLayer{{2, 2}});
    c = width;
  }
  return m;
}

Model toy_model(Rng& rng) {
  const std::size_t widths[] = {8, 16};
  return toy_model(rng, 3, widths);
}

Model random_model(Rng& rng, std::size_t in_c, std::size_t h, std::size_t w, std::size_t max_layers) {
  Model m;
  std::size_t c = in_c;
  bool last_was_conv = false;
  for (std::size_t attempt = 0; m.size() < max_layers && attempt < 16 * max_layers; ++attempt) {
    const std::size_t choice = m.empty() ? 0 : uniform_int(rng, 0, 2);
    if (choice == 0) {
      const std::size_t k = uniform_int(rng, 0, 1) ? 3 : 1;
      const std::size_t pad = k == 3 ? uniform_int(rng, 0, 1) : 0;
      if (h + 2 * pad < k || w + 2 * pad < k) continue;
      const std::size_t stride = uniform_int(rng, 1, 2);
      const std::size_t out_c = uniform_int(rng, 1, 10);
      m.emplace_back(random_conv(rng, c, out_c, k, stride, pad));
      c = out_c;
      h = (h + 2 * pad - k) / stride + 1;
      w = (w + 2 * pad - k) / stride + 1;
      last_was_conv = true;
    } else if (choice == 1 && last_was_conv) {
      m.emplace_back(ReluLayer{});
      last_was_conv = false;
    } else if (std::min(h, w) >= 2) {
      m.emplace_back(MaxPoolLayer{{2, 2}});
      h = (h - 2) / 2 + 1;
      w = (w - 2) / 2 + 1;
      last_was_conv = false;
    }
  }
  return m;
}

Tensor4 concat_batch(std::span<const Tensor4> parts) {
  Shape4 s = parts.front().shape();
  s.n = 0;
  std::vector<float> data;
  for (const auto& p : parts) {
    s.n += p.n();
    data.insert(data.end(), p.values().begin(), p.values().end());
  }
  return Tensor4(s, std::move(data));
}

Tensor4 permute_batch(const Tensor4& t, std::span<const std::size_t> perm) {
  const std::size_t stride = t.c() * t.h() * t.w();
  std::vector<float> data(t.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    std::copy_n(t.values().begin() + static_cast<std::ptrdiff_t>(perm[i] * stride), stride,
                data.begin() + static_cast<std::ptrdiff_t>(i * stride));
  }
  return Tensor4(t.shape(), std::move(data));
}

Tensor4 slice_batch(const Tensor4& t, std::size_t index) {
  const std::size_t stride = t.c() * t.h() * t.w();
  const auto begin = t.values().begin() + static_cast<std::ptrdiff_t>(index * stride);
  return Tensor4(Shape4{1, t.c(), t.h(), t.w()}, std::vector<float>(begin, begin + static_cast<std::ptrdiff_t>(stride)));
}

}  // namespace prism::toy
