#include "prism/pca.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

#include "prism/error.hpp"
#include "prism/kernels.hpp"

namespace prism {

namespace {

// Round-robin tournament: every unordered pair of `count` columns appears in
// exactly one round, and the pairs inside a round are disjoint.
std::vector<std::vector<ColumnPair>> round_robin(std::size_t count) {
  std::vector<std::vector<ColumnPair>> rounds;
  if (count < 2) return rounds;
  const std::size_t m = count + (count % 2);  // padded with a bye when odd
  std::vector<std::size_t> seats(m);
  std::iota(seats.begin(), seats.end(), 0);
  for (std::size_t r = 0; r + 1 < m; ++r) {
    std::vector<ColumnPair> pairs;
    for (std::size_t i = 0; i < m / 2; ++i) {
      std::size_t p = seats[i];
      std::size_t q = seats[m - 1 - i];
      if (p >= count || q >= count) continue;
      if (p > q) std::swap(p, q);
      pairs.emplace_back(p, q);
    }
    rounds.push_back(std::move(pairs));
    std::rotate(seats.begin() + 1, seats.end() - 1, seats.end());
  }
  return rounds;
}

struct JacobiOutput {
  std::vector<double> a;  // rotated columns, column-major, `cols` × `len`
  std::vector<double> v;  // accumulated rotation, column-major, `cols` × `cols`
};

// Hestenes iteration on the columns of a row-major `rows`×`cols` matrix.
JacobiOutput orthogonalize_columns(std::span<const float> row_major, std::size_t rows,
                                   std::size_t cols, bool transpose, const SvdOptions& options) {
  // With `transpose`, the input is treated as its cols×rows transpose.
  const std::size_t len = transpose ? cols : rows;
  const std::size_t count = transpose ? rows : cols;

  JacobiOutput out;
  out.a.resize(count * len);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = row_major[r * cols + c];
      if (transpose) {
        out.a[r * len + c] = x;
      } else {
        out.a[c * len + r] = x;
      }
    }
  }
  out.v.assign(count * count, 0.0);
  for (std::size_t j = 0; j < count; ++j) out.v[j * count + j] = 1.0;

  const ColumnBlock a_block{out.a, len};
  const ColumnBlock v_block{out.v, count};
  const double tol = std::max(1e-14, 4.0 * DBL_EPSILON * static_cast<double>(len));
  const std::size_t budget =
      options.max_sweeps != 0 ? options.max_sweeps : 100 * std::min(rows, cols);
  const auto rounds = round_robin(count);

  for (std::size_t sweep = 0;; ++sweep) {
    if (sweep >= budget) {
      throw Error(Errc::NonConvergence, "Jacobi SVD did not converge within " +
                                            std::to_string(budget) + " sweeps");
    }
    std::size_t rotations = 0;
    for (const auto& pairs : rounds) {
      rotations += options.parallel ? kernels::rotate_pairs(a_block, v_block, pairs, tol)
                                    : reference::rotate_pairs(a_block, v_block, pairs, tol);
    }
    if (rotations == 0) break;
  }
  return out;
}

double column_norm(const double* col, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += col[i] * col[i];
  return std::sqrt(acc);
}

// Fills every column flagged in `missing` with a unit vector orthogonal to all
// other columns, trying standard basis vectors in index order.
void complete_orthonormal(std::vector<double>& cols, std::size_t len, std::size_t count,
                          const std::vector<bool>& missing) {
  std::vector<bool> ready(count);
  for (std::size_t j = 0; j < count; ++j) ready[j] = !missing[j];
  std::size_t next_basis = 0;
  std::vector<double> cand(len);
  for (std::size_t j = 0; j < count; ++j) {
    if (!missing[j]) continue;
    for (; next_basis < len; ++next_basis) {
      std::fill(cand.begin(), cand.end(), 0.0);
      cand[next_basis] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < count; ++k) {
          if (!ready[k]) continue;
          const double* col = cols.data() + k * len;
          double dot = 0.0;
          for (std::size_t i = 0; i < len; ++i) dot += col[i] * cand[i];
          for (std::size_t i = 0; i < len; ++i) cand[i] -= dot * col[i];
        }
      }
      const double norm = column_norm(cand.data(), len);
      if (norm > 0.5) {
        double* dst = cols.data() + j * len;
        for (std::size_t i = 0; i < len; ++i) dst[i] = cand[i] / norm;
        ready[j] = true;
        ++next_basis;
        break;
      }
    }
  }
}

Matrix to_row_major(const std::vector<double>& cols, std::size_t len, std::size_t count) {
  Matrix m{len, count, std::vector<float>(len * count)};
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t i = 0; i < len; ++i) m.at(i, j) = static_cast<float>(cols[j * len + i]);
  }
  return m;
}

}  // namespace

SvdResult svd(const ObservationMatrix& m, const SvdOptions& options) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const std::size_t r = std::min(rows, cols);
  const bool wide = rows < cols;
  const auto src = m.values();

  JacobiOutput jac = orthogonalize_columns(src, rows, cols, wide, options);
  const std::size_t len = wide ? cols : rows;      // length of each rotated column
  const std::size_t count = wide ? rows : cols;    // number of rotated columns

  std::vector<double> norms(count);
  for (std::size_t j = 0; j < count; ++j) norms[j] = column_norm(jac.a.data() + j * len, len);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  // Column-major factors in double: left (rows×r) and right (cols×r).
  std::vector<double> left(r * rows, 0.0);
  std::vector<double> right(r * cols, 0.0);
  std::vector<double> sing(r);
  std::vector<bool> left_missing(r, false);
  std::vector<bool> right_missing(r, false);

  for (std::size_t j = 0; j < r; ++j) {
    const std::size_t src_col = order[j];
    sing[j] = norms[src_col];
    const double* rotated = jac.a.data() + src_col * len;
    const double* rotation = jac.v.data() + src_col * count;
    if (!wide) {
      std::copy(rotation, rotation + cols, right.begin() + static_cast<std::ptrdiff_t>(j * cols));
      if (sing[j] > 0.0) {
        for (std::size_t i = 0; i < rows; ++i) left[j * rows + i] = rotated[i] / sing[j];
      } else {
        left_missing[j] = true;
      }
    } else {
      if (sing[j] > 0.0) {
        for (std::size_t i = 0; i < cols; ++i) right[j * cols + i] = rotated[i] / sing[j];
      } else {
        right_missing[j] = true;
      }
      // Fallback left vector, used when S[j] is too small for A·v/S.
      std::copy(rotation, rotation + rows, left.begin() + static_cast<std::ptrdiff_t>(j * rows));
    }
  }
  complete_orthonormal(right, cols, r, right_missing);

  // Sign convention on the right vectors.
  for (std::size_t j = 0; j < r; ++j) {
    double* vj = right.data() + j * cols;
    std::size_t arg = 0;
    for (std::size_t i = 1; i < cols; ++i) {
      if (std::abs(vj[i]) > std::abs(vj[arg])) arg = i;
    }
    if (vj[arg] < 0.0) {
      for (std::size_t i = 0; i < cols; ++i) vj[i] = -vj[i];
      double* uj = left.data() + j * rows;
      for (std::size_t i = 0; i < rows; ++i) uj[i] = -uj[i];
    }
  }

  if (wide) {
    // U = A·V·S⁻¹ evaluated row by row, so identical observations get
    // identical rows of U.
    // Below `tiny`, rounding in A·v swamps S[j]; keep the rotation column.
    const double tiny = sing[0] * 1e-9;
    for (std::size_t j = 0; j < r; ++j) {
      if (!(sing[j] > tiny)) continue;
      const double* vj = right.data() + j * cols;
      for (std::size_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += static_cast<double>(src[i * cols + c]) * vj[c];
        left[j * rows + i] = acc / sing[j];
      }
    }
  } else {
    complete_orthonormal(left, rows, r, left_missing);
  }

  SvdResult out;
  out.u = to_row_major(left, rows, r);
  out.v = to_row_major(right, cols, r);
  out.s.resize(r);
  for (std::size_t j = 0; j < r; ++j) out.s[j] = static_cast<float>(sing[j]);
  return out;
}

ScoreMaps principal_scores(const ObservationMatrix& centered, std::size_t k,
                           const SvdOptions& options) {
  if (k == 0) throw Error(Errc::InvalidArgument, "component count must be >= 1");
  const SvdResult f = svd(centered, options);
  const std::size_t rows = centered.rows();
  const std::size_t r = f.s.size();

  // Numerical rank at float32 precision; smaller singular values are noise.
  const double cutoff = r == 0 ? 0.0
                               : static_cast<double>(f.s[0]) *
                                     static_cast<double>(std::max(rows, centered.cols())) * FLT_EPSILON;

  std::vector<float> scores(rows * k, 0.0f);
  for (std::size_t j = 0; j < std::min(k, r); ++j) {
    if (!(static_cast<double>(f.s[j]) > cutoff)) continue;
    for (std::size_t i = 0; i < rows; ++i) scores[i * k + j] = f.u.at(i, j) * f.s[j];
  }
  ObservationMatrix score_matrix(rows, k, std::move(scores), centered.origin());
  return {observations_to_tensor(score_matrix), f.s};
}

}  // namespace prism
