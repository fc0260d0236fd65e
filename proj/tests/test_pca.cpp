#include <doctest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "prism/error.hpp"
#include "prism/pca.hpp"
#include "toy.hpp"

using namespace prism;

namespace {

double column_dot(const Matrix& m, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) s += double(m.at(i, a)) * m.at(i, b);
  return s;
}

void check_orthonormal(const Matrix& m, double tol) {
  for (std::size_t a = 0; a < m.cols; ++a)
    for (std::size_t b = a; b < m.cols; ++b) CHECK(std::abs(column_dot(m, a, b) - (a == b ? 1.0 : 0.0)) < tol);
}

double reconstruction_error(const ObservationMatrix& a, const SvdResult& r) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < r.s.size(); ++k) s += double(r.u.at(i, k)) * r.s[k] * r.v.at(j, k);
      worst = std::max(worst, std::abs(s - a.at(i, j)));
    }
  return worst;
}

}  // namespace

TEST_CASE("svd of diag(3, 2)") {
  const auto r = svd(ObservationMatrix(2, 2, {3, 0, 0, 2}));
  CHECK(r.s == std::vector<float>{3, 2});
  CHECK(r.u.data == std::vector<float>{1, 0, 0, 1});
  CHECK(r.v.data == std::vector<float>{1, 0, 0, 1});
}

TEST_CASE("svd of a zero matrix") {
  const auto r = svd(ObservationMatrix(4, 3, std::vector<float>(12, 0.0f)));
  CHECK(r.s == std::vector<float>{0, 0, 0});
  check_orthonormal(r.u, 1e-6);
  check_orthonormal(r.v, 1e-6);
}

TEST_CASE("svd agrees with the Gram eigenvalue oracle") {
  toy::Rng rng(31);
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{8, 5}, {5, 5}, {3, 7}, {12, 1}, {1, 6}}) {
    CAPTURE(rows);
    CAPTURE(cols);
    const auto a = toy::random_matrix(rng, rows, cols, -2.0f, 2.0f);
    const auto r = svd(a);
    const auto eig = oracle::symmetric_eigenvalues(oracle::gram(a), cols);
    REQUIRE(r.s.size() == std::min(rows, cols));
    for (std::size_t k = 0; k < r.s.size(); ++k) {
      CHECK(double(r.s[k]) * r.s[k] == doctest::Approx(eig[k]).epsilon(1e-4).scale(1e-6));
      if (k > 0) CHECK(r.s[k] <= r.s[k - 1]);
    }
    check_orthonormal(r.u, 1e-5);
    check_orthonormal(r.v, 1e-5);
    CHECK(reconstruction_error(a, r) < 1e-5);
    // Sign convention: the largest |entry| of each right vector is positive.
    for (std::size_t k = 0; k < r.v.cols; ++k) {
      float best = 0.0f;
      for (std::size_t j = 0; j < r.v.rows; ++j)
        if (std::abs(r.v.at(j, k)) > std::abs(best)) best = r.v.at(j, k);
      CHECK(best >= 0.0f);
    }
  }
}

TEST_CASE("principal scores of a one-dimensional point cloud") {
  const auto centered = center_columns(ObservationMatrix(3, 2, {1, 0, -1, 0, 0, 0}, {1, 1, 3}));
  const auto maps = principal_scores(centered.centered);
  CHECK(maps.scores.shape() == Shape4{1, 3, 1, 3});
  CHECK(maps.singular_values[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(maps.singular_values[1] == 0.0f);
  for (std::size_t x = 0; x < 3; ++x) {
    CHECK(maps.scores.at(0, 0, 0, x) == doctest::Approx(std::vector<float>{1, -1, 0}[x]));
    CHECK(maps.scores.at(0, 1, 0, x) == 0.0f);
    CHECK(maps.scores.at(0, 2, 0, x) == 0.0f);
  }
}

TEST_CASE("principal scores equal centered data times V") {
  toy::Rng rng(32);
  const auto a = toy::random_matrix(rng, 30, 6, -1.0f, 3.0f);
  const auto c = center_columns(a).centered;
  const auto r = svd(c);
  const auto maps = principal_scores(c);
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t k = 0; k < 3; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < c.cols(); ++j) s += double(c.at(i, j)) * r.v.at(j, k);
      CHECK(std::abs(maps.scores.at(i, k, 0, 0) - s) < 1e-4);
    }
  // Score channels have decreasing variance and are uncorrelated.
  std::vector<double> var(3, 0.0);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < c.rows(); ++i) var[k] += std::pow(maps.scores.at(i, k, 0, 0), 2);
  CHECK(var[0] >= var[1]);
  CHECK(var[1] >= var[2]);
  double cross = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i) cross += maps.scores.at(i, 0, 0, 0) * maps.scores.at(i, 1, 0, 0);
  CHECK(std::abs(cross) < 1e-3);
}

TEST_CASE("scores are equivariant under scaling and row permutation") {
  toy::Rng rng(33);
  const auto a = toy::random_matrix(rng, 20, 5);
  const auto base = principal_scores(center_columns(a).centered);

  std::vector<float> doubled = a.vector();
  for (float& x : doubled) x *= 2.5f;
  const auto big = principal_scores(center_columns(ObservationMatrix(20, 5, doubled)).centered);
  for (std::size_t i = 0; i < base.scores.size(); ++i)
    CHECK(std::abs(big.scores.values()[i] - 2.5f * base.scores.values()[i]) < 1e-4);

  std::vector<float> reversed(a.vector().size());
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 5; ++j) reversed[(19 - i) * 5 + j] = a.at(i, j);
  const auto perm = principal_scores(center_columns(ObservationMatrix(20, 5, reversed)).centered);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 20; ++i)
      CHECK(std::abs(perm.scores.at(19 - i, k, 0, 0) - base.scores.at(i, k, 0, 0)) < 1e-4);
}

TEST_CASE("k larger than the rank pads with zero channels") {
  toy::Rng rng(34);
  const auto c = center_columns(toy::random_matrix(rng, 10, 2)).centered;
  const auto maps = principal_scores(c, 3);
  CHECK(maps.scores.c() == 3);
  for (std::size_t i = 0; i < 10; ++i) CHECK(maps.scores.at(i, 2, 0, 0) == 0.0f);
  CHECK_THROWS_AS(principal_scores(c, 0), Error);
}

TEST_CASE("serial and parallel svd are bit-identical") {
  toy::Rng rng(35);
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{64, 16}, {9, 20}}) {
    const auto a = toy::random_matrix(rng, rows, cols);
    const auto p = svd(a, {.max_sweeps = 0, .parallel = true});
    const auto s = svd(a, {.max_sweeps = 0, .parallel = false});
    CHECK(p.s == s.s);
    CHECK(p.u.data == s.u.data);
    CHECK(p.v.data == s.v.data);
  }
}

TEST_CASE("wide matrices reconstruct") {
  toy::Rng rng(36);
  const auto a = toy::random_matrix(rng, 4, 11);
  const auto r = svd(a);
  CHECK(r.u.rows == 4);
  CHECK(r.u.cols == 4);
  CHECK(r.v.rows == 11);
  check_orthonormal(r.u, 1e-5);
  check_orthonormal(r.v, 1e-5);
  CHECK(reconstruction_error(a, r) < 1e-5);
}

TEST_CASE("svd reports non-convergence when the sweep budget is exhausted") {
  toy::Rng rng(37);
  const auto a = toy::random_matrix(rng, 12, 8);
  try {
    svd(a, {.max_sweeps = 1});
    FAIL("expected NonConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonConvergence);
  }
}
