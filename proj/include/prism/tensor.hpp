#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace prism {

struct Shape4 {
  std::size_t n = 1;  // batch
  std::size_t c = 1;  // channels
  std::size_t h = 1;  // rows
  std::size_t w = 1;  // columns

  std::size_t count() const { return n * c * h * w; }
  std::size_t plane() const { return h * w; }
  bool operator==(const Shape4&) const = default;
  std::string str() const;
};

/// Dense (n, c, h, w) float tensor, row-major.
///
/// All dimensions are at least 1 and every element is finite; both are checked
/// on construction, so any Tensor4 that exists satisfies them. The value is
/// immutable once built.
class Tensor4 {
 public:
  Tensor4(Shape4 shape, std::vector<float> data);

  static Tensor4 zeros(Shape4 shape);
  static Tensor4 filled(Shape4 shape, float value);

  const Shape4& shape() const { return shape_; }
  std::size_t n() const { return shape_.n; }
  std::size_t c() const { return shape_.c; }
  std::size_t h() const { return shape_.h; }
  std::size_t w() const { return shape_.w; }
  std::size_t size() const { return data_.size(); }

  std::span<const float> values() const { return data_; }
  const std::vector<float>& vector() const { return data_; }

  std::size_t index(std::size_t b, std::size_t ch, std::size_t y, std::size_t x) const {
    return ((b * shape_.c + ch) * shape_.h + y) * shape_.w + x;
  }
  float at(std::size_t b, std::size_t ch, std::size_t y, std::size_t x) const {
    return data_[index(b, ch, y, x)];
  }

  bool operator==(const Tensor4&) const = default;

 private:
  Shape4 shape_;
  std::vector<float> data_;
};

/// Origin of an observation matrix: the batch and spatial extent its rows
/// were flattened from.
struct ObservationOrigin {
  std::size_t n = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  bool operator==(const ObservationOrigin&) const = default;
};

/// v×c row-major matrix, one row per (image, y, x) position, one column per
/// channel.
class ObservationMatrix {
 public:
  ObservationMatrix(std::size_t rows, std::size_t cols, std::vector<float> data,
                    ObservationOrigin origin);
  // Plain matrix with a trivial origin (rows×1×1).
  ObservationMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const ObservationOrigin& origin() const { return origin_; }
  std::span<const float> values() const { return data_; }
  const std::vector<float>& vector() const { return data_; }
  float at(std::size_t r, std::size_t col) const { return data_[r * cols_ + col]; }

  bool operator==(const ObservationMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<float> data_;
  ObservationOrigin origin_;
};

/// Row `b*h*w + y*w + x`, column `ch` receives t(b, ch, y, x).
ObservationMatrix reshape_to_observations(const Tensor4& t);

/// Inverse of reshape_to_observations; the channel count is m.cols().
Tensor4 observations_to_tensor(const ObservationMatrix& m);

struct CenteredColumns {
  ObservationMatrix centered;
  std::vector<float> means;
};

/// Subtracts the per-column mean. Means accumulate in double.
CenteredColumns center_columns(const ObservationMatrix& m);

/// Per-pixel sum over channels, shape (n, 1, h, w).
Tensor4 channel_sum(const Tensor4& t);

/// Element-wise multiplication by a scalar.
Tensor4 scaled(const Tensor4& t, float alpha);

}  // namespace prism
