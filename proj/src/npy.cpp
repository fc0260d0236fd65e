#include "prism/npy.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "prism/error.hpp"

namespace prism {

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read and written as little-endian");

namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kPreamble = 10;  // magic(6) + version(2) + header length(2)

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  Header parse() {
    Header h;
    bool have_descr = false;
    bool have_order = false;
    bool have_shape = false;
    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') break;
      const std::string key = quoted();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        h.descr = quoted();
        have_descr = true;
      } else if (key == "fortran_order") {
        h.fortran_order = boolean();
        have_order = true;
      } else if (key == "shape") {
        h.shape = tuple();
        have_shape = true;
      } else {
        fail("unexpected header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      if (peek() != '}') fail("expected ',' or '}'");
    }
    if (!have_descr || !have_order || !have_shape) fail("header misses descr, fortran_order or shape");
    return h;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::ParseError, "NPY header: " + why + " at offset " + std::to_string(pos_));
  }
  std::string quoted() {
    const char q = peek();
    if (q != '\'' && q != '"') fail("expected a quoted string");
    ++pos_;
    const auto end = text_.find(q, pos_);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string out(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  bool boolean() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }
  std::vector<std::size_t> tuple() {
    std::vector<std::size_t> dims;
    expect('(');
    while (true) {
      skip_ws();
      if (peek() == ')') break;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a dimension");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        v = v * 10 + static_cast<std::size_t>(peek() - '0');
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
    ++pos_;
    return dims;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string shape_text(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

}  // namespace

NpyArray read_npy_array(std::string_view bytes) {
  if (bytes.size() < kPreamble || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(Errc::BadMagic, "stream does not start with \\x93NUMPY");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw Error(Errc::UnsupportedVersion, "NPY version " + std::to_string(major) + "." +
                                              std::to_string(minor) + " (only 1.0 is supported)");
  }
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) |
                                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < kPreamble + header_len) {
    throw Error(Errc::TruncatedPayload, "header declares " + std::to_string(header_len) +
                                            " bytes but the stream ends early");
  }
  const Header h = HeaderParser(bytes.substr(kPreamble, header_len)).parse();

  std::size_t item = 0;
  if (h.descr == "<f4") {
    item = 4;
  } else if (h.descr == "<f8") {
    item = 8;
  } else {
    throw Error(Errc::UnsupportedDtype, "dtype '" + h.descr + "' (expected <f4 or <f8)");
  }
  if (h.fortran_order) throw Error(Errc::FortranOrderUnsupported, "fortran_order arrays are not supported");
  if (h.shape.empty() || h.shape.size() > 4) {
    throw Error(Errc::ShapeRankUnsupported, "rank " + std::to_string(h.shape.size()) + " arrays");
  }

  std::size_t count = 1;
  for (auto d : h.shape) count *= d;
  const std::string_view payload = bytes.substr(kPreamble + header_len);
  if (payload.size() < count * item) {
    throw Error(Errc::TruncatedPayload, "payload holds " + std::to_string(payload.size()) +
                                            " bytes, shape needs " + std::to_string(count * item));
  }

  NpyArray out{h.shape, std::vector<float>(count)};
  if (item == 4) {
    std::memcpy(out.data.data(), payload.data(), count * 4);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      double v;
      std::memcpy(&v, payload.data() + i * 8, 8);
      out.data[i] = static_cast<float>(v);
    }
  }
  return out;
}

std::string write_npy_array(std::span<const std::size_t> shape, std::span<const float> data) {
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape_text(shape) + ", }";
  const std::size_t unpadded = kPreamble + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict.push_back('\n');

  std::string out(kMagic);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(dict.size() & 0xff));
  out.push_back(static_cast<char>((dict.size() >> 8) & 0xff));
  out += dict;
  const std::size_t at = out.size();
  out.resize(at + data.size() * 4);
  std::memcpy(out.data() + at, data.data(), data.size() * 4);
  return out;
}

NpyValue read_npy(std::string_view bytes) {
  NpyArray a = read_npy_array(bytes);
  if (a.shape.size() == 4) {
    return Tensor4(Shape4{a.shape[0], a.shape[1], a.shape[2], a.shape[3]}, std::move(a.data));
  }
  if (a.shape.size() == 2) return ObservationMatrix(a.shape[0], a.shape[1], std::move(a.data));
  throw Error(Errc::ShapeRankUnsupported,
              "expected a 2-D or 4-D array, got rank " + std::to_string(a.shape.size()));
}

Tensor4 read_npy_tensor(std::string_view bytes) {
  NpyValue v = read_npy(bytes);
  if (auto* t = std::get_if<Tensor4>(&v)) return std::move(*t);
  throw Error(Errc::ShapeRankUnsupported, "expected a 4-D array, got a matrix");
}

std::string write_npy(const Tensor4& t) {
  const std::size_t shape[] = {t.n(), t.c(), t.h(), t.w()};
  return write_npy_array(shape, t.values());
}

std::string write_npy(const ObservationMatrix& m) {
  const std::size_t shape[] = {m.rows(), m.cols()};
  return write_npy_array(shape, m.values());
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingFile, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::MissingFile, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::MissingFile, "short write to '" + path.string() + "'");
}

}  // namespace prism
