#pragma once

#include <cstddef>
#include <vector>

#include "prism/tensor.hpp"

namespace prism {

// Small dense row-major matrix used for SVD factors.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  float& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

/// Thin SVD A = U·diag(S)·Vᵀ of a v×c matrix, r = min(v, c).
///
/// S is non-increasing; the columns of U and V are orthonormal. Singular
/// vectors are only defined up to sign, so each column pair (u_j, v_j) is
/// oriented such that the largest-magnitude entry of v_j is non-negative (the
/// lowest row index wins ties). Left vectors for zero singular values are
/// completed deterministically to keep U orthonormal.
struct SvdResult {
  Matrix u;                // v×r
  std::vector<float> s;    // r
  Matrix v;                // c×r
};

struct SvdOptions {
  // Jacobi sweep budget; 0 means 100·min(v, c).
  std::size_t max_sweeps = 0;
  // Rotate disjoint column pairs on the OpenMP kernel (false: serial reference).
  bool parallel = true;
};

/// One-sided (Hestenes) Jacobi SVD, computed in double precision.
/// Throws Errc::NonConvergence when the sweep budget runs out.
SvdResult svd(const ObservationMatrix& m, const SvdOptions& options = {});

/// Leading principal-score channels, reshaped back to (n, k, h, w).
struct ScoreMaps {
  Tensor4 scores;
  std::vector<float> singular_values;  // all r values, for diagnostics
};

/// Column j of the score matrix is U[:, j]·S[j] for the numerically nonzero
/// singular values among the first k; the remaining channels are zero.
/// `centered` should come from center_columns.
ScoreMaps principal_scores(const ObservationMatrix& centered, std::size_t k = 3,
                           const SvdOptions& options = {});

}  // namespace prism
