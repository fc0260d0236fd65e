#pragma once

// JSON interchange files: the activation manifest (recorded layer tensors
// stored as one NPY file each) and the model architecture file.
//
// manifest.json:
//   {"layers": [{"name": "...", "file": "a.npy", "shape": [n, c, h, w]}, ...],
//    "input":  {"file": "input.npy", "shape": [n, 3, H, W]}}      (optional)
//
// model.json:
//   {"layers": [{"kind": "conv", "weights_file": "w0.npy", "bias_file": "b0.npy",
//                "stride": 1, "padding": 1},
//               {"kind": "relu"},
//               {"kind": "maxpool", "window": 2, "stride": 2}, ...]}
//
// File paths are relative to the directory holding the JSON file.

#include <filesystem>
#include <optional>

#include "prism/activations.hpp"
#include "prism/inference.hpp"
#include "prism/tensor.hpp"

namespace prism {

struct ManifestContents {
  ActivationStack stack;
  std::optional<Tensor4> input;
};

/// Loads the layers shallowest-first in manifest order. Shapes listed in the
/// manifest must equal the NPY headers (Errc::ManifestShapeMismatch) and all
/// batch sizes must agree (Errc::BatchSizeMismatch).
ManifestContents read_manifest(const std::filesystem::path& path);

/// Writes `<dir>/manifest.json` plus one NPY per layer (and input.npy).
/// Returns the manifest path.
std::filesystem::path write_manifest(const std::filesystem::path& dir, const ActivationStack& stack,
                                     const std::optional<Tensor4>& input = std::nullopt);

Model load_model(const std::filesystem::path& path);

/// Writes `<dir>/model.json` with conv weights as `conv<i>_weights.npy`
/// (out_c, in_c, kh, kw) and biases as `conv<i>_bias.npy` (out_c,).
std::filesystem::path save_model(const std::filesystem::path& dir, const Model& model);

}  // namespace prism
