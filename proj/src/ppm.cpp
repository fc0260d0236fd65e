#include "prism/ppm.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "prism/error.hpp"

namespace prism {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw Error(Errc::BadHeader, "PPM header ends early");
    return bytes_.substr(start, pos_ - start);
  }

  std::size_t number() {
    const auto tok = token();
    std::size_t v = 0;
    for (char c : tok) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw Error(Errc::BadHeader, "expected a number in PPM header, got '" + std::string(tok) + "'");
      }
      v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(Errc::BadHeader, "missing whitespace after maxval");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Tensor4 read_image_ppm(std::string_view bytes) {
  HeaderReader header(bytes);
  if (header.token() != "P6") throw Error(Errc::BadHeader, "not a binary PPM (P6)");
  const std::size_t w = header.number();
  const std::size_t h = header.number();
  const std::size_t maxval = header.number();
  if (w == 0 || h == 0) throw Error(Errc::BadHeader, "PPM has zero width or height");
  if (maxval != 255) {
    throw Error(Errc::BadHeader, "maxval " + std::to_string(maxval) + " (only 255 is supported)");
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t plane = w * h;
  if (bytes.size() < offset + 3 * plane) {
    throw Error(Errc::TruncatedPixels, "PPM raster needs " + std::to_string(3 * plane) +
                                           " bytes, found " + std::to_string(bytes.size() - offset));
  }
  std::vector<float> data(3 * plane);
  const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t i = 0; i < plane; ++i) {
    for (std::size_t ch = 0; ch < 3; ++ch) {
      data[ch * plane + i] = static_cast<float>(raster[3 * i + ch]) / 255.0f;
    }
  }
  return Tensor4(Shape4{1, 3, h, w}, std::move(data));
}

std::string write_image_ppm(const RgbMapBatch& maps, std::size_t index) {
  const Tensor4& t = maps.maps();
  if (index >= t.n()) {
    throw Error(Errc::InvalidArgument, "image index " + std::to_string(index) + " out of range for batch of " +
                                           std::to_string(t.n()));
  }
  const std::size_t h = t.h();
  const std::size_t w = t.w();
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  const std::size_t at = out.size();
  out.resize(at + 3 * h * w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const long v = std::lround(static_cast<double>(t.at(index, ch, y, x)) * 255.0);
        out[at + 3 * (y * w + x) + ch] = static_cast<char>(static_cast<unsigned char>(v));
      }
    }
  }
  return out;
}

}  // namespace prism
