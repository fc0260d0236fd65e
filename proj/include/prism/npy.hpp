#pragma once

// NPY version 1.0 reader/writer for little-endian float arrays.
//
// Writing always produces `<f4`, C order, with the header padded by spaces so
// that magic + version + length + header text ends on a 64-byte boundary.
// Reading also accepts `<f8` (narrowed to float). Bytes are carried in
// std::string.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prism/tensor.hpp"

namespace prism {

struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

/// Decodes any array of rank 1 to 4.
NpyArray read_npy_array(std::string_view bytes);
std::string write_npy_array(std::span<const std::size_t> shape, std::span<const float> data);

/// Rank 4 decodes to a Tensor4, rank 2 to an ObservationMatrix; anything else
/// is Errc::ShapeRankUnsupported.
using NpyValue = std::variant<Tensor4, ObservationMatrix>;
NpyValue read_npy(std::string_view bytes);
Tensor4 read_npy_tensor(std::string_view bytes);

std::string write_npy(const Tensor4& t);
std::string write_npy(const ObservationMatrix& m);

// Errc::MissingFile when the file cannot be opened.
std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace prism
