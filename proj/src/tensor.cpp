#include "prism/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "prism/error.hpp"
#include "prism/kernels.hpp"

namespace prism {

namespace {

void require_finite(std::span<const float> data, const char* what) {
  const auto bad = std::find_if(data.begin(), data.end(), [](float x) { return !std::isfinite(x); });
  if (bad != data.end()) {
    throw Error(Errc::NonFinite, std::string(what) + " has a non-finite value at flat index " +
                                     std::to_string(bad - data.begin()));
  }
}

}  // namespace

std::string Shape4::str() const {
  return "(" + std::to_string(n) + ", " + std::to_string(c) + ", " + std::to_string(h) + ", " +
         std::to_string(w) + ")";
}

Tensor4::Tensor4(Shape4 shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
  if (shape_.n == 0 || shape_.c == 0 || shape_.h == 0 || shape_.w == 0) {
    throw Error(Errc::ShapeMismatch, "tensor dimensions must be >= 1, got " + shape_.str());
  }
  if (data_.size() != shape_.count()) {
    throw Error(Errc::ShapeMismatch, "tensor " + shape_.str() + " needs " +
                                         std::to_string(shape_.count()) + " values, got " +
                                         std::to_string(data_.size()));
  }
  require_finite(data_, "tensor");
}

Tensor4 Tensor4::zeros(Shape4 shape) { return filled(shape, 0.0f); }

Tensor4 Tensor4::filled(Shape4 shape, float value) {
  return Tensor4(shape, std::vector<float>(shape.count(), value));
}

ObservationMatrix::ObservationMatrix(std::size_t rows, std::size_t cols, std::vector<float> data,
                                     ObservationOrigin origin)
    : rows_(rows), cols_(cols), data_(std::move(data)), origin_(origin) {
  if (rows_ == 0 || cols_ == 0) {
    throw Error(Errc::ShapeMismatch, "observation matrix needs at least one row and column");
  }
  if (data_.size() != rows_ * cols_) {
    throw Error(Errc::ShapeMismatch, "matrix " + std::to_string(rows_) + "x" +
                                         std::to_string(cols_) + " needs " +
                                         std::to_string(rows_ * cols_) + " values, got " +
                                         std::to_string(data_.size()));
  }
  if (origin_.n * origin_.h * origin_.w != rows_) {
    throw Error(Errc::ShapeMismatch, "observation origin does not multiply out to the row count");
  }
  require_finite(data_, "matrix");
}

ObservationMatrix::ObservationMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : ObservationMatrix(rows, cols, std::move(data), ObservationOrigin{rows, 1, 1}) {}

ObservationMatrix reshape_to_observations(const Tensor4& t) {
  const Shape4& s = t.shape();
  const std::size_t plane = s.plane();
  std::vector<float> out(t.size());
  const auto src = t.values();
  for (std::size_t b = 0; b < s.n; ++b) {
    for (std::size_t ch = 0; ch < s.c; ++ch) {
      const float* in = src.data() + (b * s.c + ch) * plane;
      for (std::size_t i = 0; i < plane; ++i) out[(b * plane + i) * s.c + ch] = in[i];
    }
  }
  return ObservationMatrix(s.n * plane, s.c, std::move(out), ObservationOrigin{s.n, s.h, s.w});
}

Tensor4 observations_to_tensor(const ObservationMatrix& m) {
  const auto& o = m.origin();
  const Shape4 s{o.n, m.cols(), o.h, o.w};
  const std::size_t plane = s.plane();
  std::vector<float> out(s.count());
  const auto src = m.values();
  for (std::size_t b = 0; b < s.n; ++b) {
    for (std::size_t ch = 0; ch < s.c; ++ch) {
      float* dst = out.data() + (b * s.c + ch) * plane;
      for (std::size_t i = 0; i < plane; ++i) dst[i] = src[(b * plane + i) * s.c + ch];
    }
  }
  return Tensor4(s, std::move(out));
}

CenteredColumns center_columns(const ObservationMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const auto src = m.values();

  std::vector<double> sums(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) sums[j] += src[r * cols + j];
  }
  std::vector<float> means(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    means[j] = static_cast<float>(sums[j] / static_cast<double>(rows));
  }

  std::vector<float> out(src.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) out[r * cols + j] = src[r * cols + j] - means[j];
  }
  return {ObservationMatrix(rows, cols, std::move(out), m.origin()), std::move(means)};
}

Tensor4 channel_sum(const Tensor4& t) {
  const Shape4 out_shape{t.n(), 1, t.h(), t.w()};
  std::vector<float> out(out_shape.count());
  kernels::channel_sum(t.values(), t.shape(), out);
  return Tensor4(out_shape, std::move(out));
}

Tensor4 scaled(const Tensor4& t, float alpha) {
  std::vector<float> out(t.values().begin(), t.values().end());
  for (float& x : out) x *= alpha;
  return Tensor4(t.shape(), std::move(out));
}

}  // namespace prism
