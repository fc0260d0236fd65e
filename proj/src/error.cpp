#include "prism/error.hpp"

namespace prism {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::EmptyStack: return "EmptyStack";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::BadMagic: return "BadMagic";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::UnsupportedDtype: return "UnsupportedDtype";
    case Errc::FortranOrderUnsupported: return "FortranOrderUnsupported";
    case Errc::ShapeRankUnsupported: return "ShapeRankUnsupported";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::ManifestShapeMismatch: return "ManifestShapeMismatch";
    case Errc::MissingFile: return "MissingFile";
    case Errc::BatchSizeMismatch: return "BatchSizeMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::BadHeader: return "BadHeader";
    case Errc::TruncatedPixels: return "TruncatedPixels";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), detail_(what) {}

bool is_pipeline_error(Errc code) {
  return code == Errc::EmptyStack || code == Errc::NonConvergence;
}

}  // namespace prism
