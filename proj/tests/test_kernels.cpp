// The OpenMP kernels must reproduce the serial reference bit for bit,
// whatever the thread count.

#include <doctest.h>
#include <omp.h>

#include <cstring>
#include <numeric>

#include "prism/kernels.hpp"
#include "toy.hpp"

using namespace prism;

namespace {

bool same(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

template <typename F>
void for_thread_counts(F&& body) {
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    body(threads);
  }
  omp_set_num_threads(saved);
}

}  // namespace

TEST_CASE("conv2d kernel matches reference") {
  toy::Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Shape4 s{toy::uniform_int(rng, 1, 3), toy::uniform_int(rng, 1, 4), toy::uniform_int(rng, 3, 12),
                   toy::uniform_int(rng, 3, 12)};
    const ConvLayer conv = toy::random_conv(rng, s.c, toy::uniform_int(rng, 1, 5), trial % 2 ? 3 : 1,
                                            toy::uniform_int(rng, 1, 2), trial % 3 == 0 ? 1 : 0);
    const Tensor4 in = toy::random_tensor(rng, s);
    const auto& g = conv.geometry;
    const std::size_t count = s.n * g.out_c * g.out_h(s.h) * g.out_w(s.w);
    std::vector<float> ref(count);
    reference::conv2d(in.values(), s, conv.weights, conv.bias, g, ref);
    for_thread_counts([&](int) {
      std::vector<float> par(count);
      kernels::conv2d(in.values(), s, conv.weights, conv.bias, g, par);
      CHECK(same(par, ref));
    });
  }
}

TEST_CASE("maxpool, relu and channel_sum kernels match reference") {
  toy::Rng rng(22);
  const Shape4 s{3, 5, 9, 8};
  const Tensor4 in = toy::random_tensor(rng, s);
  const PoolGeometry pool{3, 2};

  std::vector<float> ref_pool(s.n * s.c * pool.out_h(s.h) * pool.out_w(s.w));
  reference::maxpool2d(in.values(), s, pool, ref_pool);
  std::vector<float> ref_relu(in.size());
  reference::relu(in.values(), ref_relu);
  std::vector<float> ref_sum(s.n * s.plane());
  reference::channel_sum(in.values(), s, ref_sum);

  for_thread_counts([&](int) {
    std::vector<float> p(ref_pool.size());
    kernels::maxpool2d(in.values(), s, pool, p);
    CHECK(same(p, ref_pool));
    std::vector<float> r(ref_relu.size());
    kernels::relu(in.values(), r);
    CHECK(same(r, ref_relu));
    std::vector<float> c(ref_sum.size());
    kernels::channel_sum(in.values(), s, c);
    CHECK(same(c, ref_sum));
  });
}

TEST_CASE("bilinear kernel matches reference for up- and downsampling") {
  toy::Rng rng(23);
  const Shape4 s{2, 3, 7, 5};
  const Tensor4 in = toy::random_tensor(rng, s);
  for (auto [oh, ow] : {std::pair<std::size_t, std::size_t>{14, 10}, {3, 2}, {7, 5}, {1, 1}, {29, 4}}) {
    std::vector<float> ref(s.n * s.c * oh * ow);
    reference::bilinear_resize(in.values(), s, oh, ow, ref);
    for_thread_counts([&](int) {
      std::vector<float> par(ref.size());
      kernels::bilinear_resize(in.values(), s, oh, ow, par);
      CHECK(same(par, ref));
    });
  }
}

TEST_CASE("pair rotation kernel matches reference") {
  toy::Rng rng(24);
  const std::size_t len = 50;
  const std::size_t cols = 8;
  std::vector<double> a0(len * cols);
  for (double& x : a0) x = toy::uniform(rng, -1.0f, 1.0f);
  std::vector<double> v0(cols * cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) v0[j * cols + j] = 1.0;
  const std::vector<ColumnPair> pairs = {{0, 7}, {1, 6}, {2, 5}, {3, 4}};

  std::vector<double> a_ref = a0;
  std::vector<double> v_ref = v0;
  const auto n_ref = reference::rotate_pairs({a_ref, len}, {v_ref, cols}, pairs, 1e-14);
  CHECK(n_ref == 4);
  for_thread_counts([&](int) {
    std::vector<double> a = a0;
    std::vector<double> v = v0;
    CHECK(kernels::rotate_pairs({a, len}, {v, cols}, pairs, 1e-14) == n_ref);
    CHECK(a == a_ref);
    CHECK(v == v_ref);
  });
  // Rotated pairs are orthogonal.
  for (const auto& [p, q] : pairs) {
    double dot = 0.0;
    for (std::size_t i = 0; i < len; ++i) dot += a_ref[p * len + i] * a_ref[q * len + i];
    CHECK(std::abs(dot) < 1e-12);
  }
}
