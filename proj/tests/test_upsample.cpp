#include <doctest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "prism/error.hpp"
#include "prism/upsample.hpp"
#include "toy.hpp"

using namespace prism;

namespace {

const Tensor4 kGrid({1, 1, 2, 3}, {0, 1, 4, 2, 3, -1});

void check_close(const Tensor4& got, const std::vector<float>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(got.values()[i] - want[i]) <= tol);
  }
}

ActivationStack stack_of(std::initializer_list<Tensor4> layers) {
  ActivationStack s;
  int i = 0;
  for (const auto& t : layers) s.push("l" + std::to_string(i++), t);
  return s;
}

}  // namespace

// Expected values produced by torch.nn.functional.interpolate(mode="bilinear",
// align_corners=False).
TEST_CASE("bilinear resize matches the reference interpolator") {
  check_close(bilinear_resize(kGrid, 5, 4),
              {0.0, 0.625, 2.125, 4.0, 0.2, 0.825, 2.0625, 3.5, 1.0, 1.625,
               1.8125, 1.5, 1.8, 2.425, 1.5625, -0.5, 2.0, 2.625, 1.5, -1.0},
              1e-6);
  check_close(bilinear_resize(kGrid, 1, 2), {1.25, 1.625}, 1e-6);
  check_close(bilinear_resize(kGrid, 3, 7),
              {0.0, 0.1428571, 0.5714286, 1.0, 2.2857144, 3.5714288, 4.0, 1.0, 1.1428572, 1.5714287, 2.0,
               1.7857143, 1.5714285, 1.5, 2.0, 2.1428571, 2.5714288, 3.0, 1.285714, -0.4285717, -1.0},
              1e-6);
}

TEST_CASE("bilinear resize edge cases") {
  check_close(bilinear_resize(Tensor4({1, 1, 1, 1}, {5}), 3, 2), std::vector<float>(6, 5.0f), 0.0);
  check_close(bilinear_resize(Tensor4({1, 1, 2, 2}, {1, 2, 1, 2}), 1, 1), {1.5}, 1e-7);

  toy::Rng rng(41);
  const Tensor4 t = toy::random_tensor(rng, {2, 3, 5, 4});
  const Tensor4 same = bilinear_resize(t, 5, 4);
  CHECK(std::memcmp(same.values().data(), t.values().data(), t.size() * sizeof(float)) == 0);

  const Tensor4 u = toy::random_tensor(rng, {2, 3, 5, 4});
  const auto lhs = bilinear_resize(Tensor4(t.shape(), [&] {
                                     std::vector<float> v(t.size());
                                     for (std::size_t i = 0; i < v.size(); ++i)
                                       v[i] = 2.0f * t.values()[i] - u.values()[i];
                                     return v;
                                   }()),
                                   11, 7);
  const auto rt = bilinear_resize(t, 11, 7);
  const auto ru = bilinear_resize(u, 11, 7);
  for (std::size_t i = 0; i < lhs.size(); ++i)
    CHECK(std::abs(lhs.values()[i] - (2.0f * rt.values()[i] - ru.values()[i])) < 1e-5);
  CHECK(oracle::max_abs_diff(oracle::bilinear_resize(oracle::widen(t), 11, 7), rt) < 1e-6);
}

TEST_CASE("normalize_to_rgb") {
  SUBCASE("per-channel max-abs scaling") {
    const Tensor4 m({1, 3, 1, 2}, {-4, 2, 1, 1, 0, 0});
    const auto rgb = normalize_to_rgb(m, 1, 2);
    check_close(rgb.maps(), {0.0, 0.75, 1.0, 1.0, 0.5, 0.5}, 1e-7);
  }
  SUBCASE("scale is shared across the batch") {
    const Tensor4 m({2, 3, 1, 1}, {1, 1, 1, -2, 4, 0});
    check_close(normalize_to_rgb(m, 1, 1).maps(), {0.75, 0.625, 1.0, 0.0, 1.0, 0.5}, 1e-7);
  }
  SUBCASE("upsampled output stays within [0, 1]") {
    toy::Rng rng(42);
    const auto rgb = normalize_to_rgb(toy::random_tensor(rng, {2, 3, 4, 4}, -3.0f, 3.0f), 17, 9);
    CHECK(rgb.height() == 17);
    CHECK(rgb.width() == 9);
    bool saturated = false;
    for (float x : rgb.maps().values()) {
      CHECK(x >= 0.0f);
      CHECK(x <= 1.0f);
      saturated = saturated || x == 0.0f || x == 1.0f;
    }
    CHECK(saturated);
  }
  CHECK_THROWS_AS(normalize_to_rgb(Tensor4::zeros({1, 2, 1, 1}), 1, 1), Error);
}

TEST_CASE("progressive sharpening") {
  toy::Rng rng(43);
  const Tensor4 scores = toy::random_tensor(rng, {2, 3, 4, 4});

  SUBCASE("all-ones layers leave normalized scores unchanged") {
    // Channel sum of a 1-channel layer of ones is 1 everywhere.
    const auto s = stack_of({Tensor4::filled({2, 1, 4, 4}, 1.0f)});
    const auto out = progressive_sharpen(scores, s);
    const auto a = normalize_to_rgb(out, 4, 4);
    const auto b = normalize_to_rgb(scores, 4, 4);
    for (std::size_t i = 0; i < a.maps().size(); ++i)
      CHECK(std::abs(a.maps().values()[i] - b.maps().values()[i]) < 1e-6);
  }
  SUBCASE("zero layer annihilates the maps") {
    const auto s = stack_of({Tensor4::zeros({2, 5, 8, 8}), Tensor4::filled({2, 2, 4, 4}, 1.0f)});
    const auto out = progressive_sharpen(scores, s);
    CHECK(out.shape() == Shape4{2, 3, 8, 8});
    for (float x : out.values()) CHECK(x == 0.0f);
  }
  SUBCASE("three layers against the 64-bit oracle") {
    const auto s = stack_of({toy::random_tensor(rng, {2, 4, 16, 16}), toy::random_tensor(rng, {2, 8, 8, 8}),
                             toy::random_tensor(rng, {2, 6, 4, 4})});
    for (bool last_only : {false, true}) {
      for (bool rescale : {false, true}) {
        SharpenOptions opts{last_only ? SharpenMode::LastOnly : SharpenMode::Progressive, rescale};
        const auto got = progressive_sharpen(scores, s, opts);
        const auto want = oracle::channel_normalized(oracle::sharpen(oracle::widen(scores), s, last_only));
        const auto got_n = normalize_to_rgb(got, got.h(), got.w());
        // Compare after per-channel normalization, which removes the rescale factors.
        CHECK(oracle::max_abs_diff(want, Tensor4(got.shape(), [&] {
                                     std::vector<float> v(got_n.maps().size());
                                     for (std::size_t i = 0; i < v.size(); ++i)
                                       v[i] = 2.0f * got_n.maps().values()[i] - 1.0f;
                                     return v;
                                   }())) < 1e-4);
      }
    }
  }
  SUBCASE("contract violations") {
    CHECK_THROWS_AS(progressive_sharpen(scores, ActivationStack{}), Error);
    const auto wrong = stack_of({Tensor4::zeros({2, 1, 5, 5})});
    CHECK_THROWS_AS(progressive_sharpen(scores, wrong), Error);
    const auto batch = stack_of({Tensor4::zeros({3, 1, 4, 4})});
    CHECK_THROWS_AS(progressive_sharpen(scores, batch), Error);
  }
}

TEST_CASE("sharpen mode names") {
  CHECK(parse_sharpen_mode("progressive") == SharpenMode::Progressive);
  CHECK(parse_sharpen_mode("last-only") == SharpenMode::LastOnly);
  CHECK(to_string(SharpenMode::LastOnly) == "last-only");
  CHECK_THROWS_AS(parse_sharpen_mode("sideways"), Error);
}
