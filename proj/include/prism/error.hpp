#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace prism {

enum class Errc {
  ShapeMismatch,
  NonFinite,
  NonConvergence,
  EmptyStack,
  InvalidArgument,
  // NPY
  BadMagic,
  UnsupportedVersion,
  UnsupportedDtype,
  FortranOrderUnsupported,
  ShapeRankUnsupported,
  TruncatedPayload,
  // manifest / model files
  ManifestShapeMismatch,
  MissingFile,
  BatchSizeMismatch,
  ParseError,
  // PPM
  BadHeader,
  TruncatedPixels,
};

std::string_view errc_name(Errc code);

// Every library failure is reported as a prism::Error carrying a code the
// CLI maps onto its exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }
  // The message without the code-name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

// True for failures of the numerical pipeline itself (as opposed to bad input
// files or shapes).
bool is_pipeline_error(Errc code);

}  // namespace prism
