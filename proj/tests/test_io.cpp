#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "prism/error.hpp"
#include "prism/inference.hpp"
#include "prism/manifest.hpp"
#include "prism/npy.hpp"
#include "prism/ppm.hpp"
#include "toy.hpp"

using namespace prism;
namespace fs = std::filesystem;
using namespace std::string_literals;

namespace {

// Layout numpy 2.2 writes for np.save of a little-endian float32 array.
std::string numpy_file(const std::string& dict, const std::string& payload_hex) {
  std::string header = dict;
  header.append(118 - dict.size() - 1, ' ');
  header += '\n';
  std::string out = std::string("\x93NUMPY\x01\x00", 8);
  out += char(118);
  out += '\0';
  out += header;
  for (std::size_t i = 0; i < payload_hex.size(); i += 2)
    out += char(std::stoi(payload_hex.substr(i, 2), nullptr, 16));
  return out;
}

std::vector<float> iota(std::size_t n) {
  std::vector<float> v(n);
  std::iota(v.begin(), v.end(), 0.0f);
  return v;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no prism::Error thrown");
  return Errc::InvalidArgument;
}

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
};

const std::string k23 = numpy_file("{'descr': '<f4', 'fortran_order': False, 'shape': (2, 3), }",
                                   "000000000000803f0000004000004040000080400000a040");

}  // namespace

TEST_CASE("npy writer reproduces numpy byte for byte") {
  CHECK(k23.size() == 152);
  CHECK(write_npy(ObservationMatrix(2, 3, iota(6))) == k23);

  const std::string k1234 = numpy_file(
      "{'descr': '<f4', 'fortran_order': False, 'shape': (1, 2, 3, 4), }",
      "000000000000803f0000004000004040000080400000a0400000c0400000e0400000004100001041000020410000304100004041"
      "000050410000604100007041000080410000884100009041000098410000a0410000a8410000b0410000b841");
  CHECK(k1234.size() == 224);
  CHECK(write_npy(Tensor4({1, 2, 3, 4}, iota(24))) == k1234);

  const std::string k3 =
      numpy_file("{'descr': '<f4', 'fortran_order': False, 'shape': (3,), }", "000000000000803f00000040");
  CHECK(k3.size() == 140);
  const std::size_t shape3[] = {3};
  CHECK(write_npy_array(shape3, iota(3)) == k3);
}

TEST_CASE("npy reader") {
  const auto m = std::get<ObservationMatrix>(read_npy(k23));
  CHECK(m.rows() == 2);
  CHECK(m.vector() == iota(6));

  toy::Rng rng(61);
  const Tensor4 t = toy::random_tensor(rng, {2, 3, 4, 5}, -1e3f, 1e3f);
  const Tensor4 back = read_npy_tensor(write_npy(t));
  CHECK(back == t);

  // np.array([[1.5, -2.0]], dtype='<f8')
  const std::string f8 =
      numpy_file("{'descr': '<f8', 'fortran_order': False, 'shape': (1, 2), }", "000000000000f83f00000000000000c0");
  const auto arr = read_npy_array(f8);
  CHECK(arr.shape == std::vector<std::size_t>{1, 2});
  CHECK(arr.data == std::vector<float>{1.5f, -2.0f});

  const std::size_t one[] = {1, 1, 1, 1};
  const float value[] = {0.25f};
  CHECK(write_npy_array(one, value).size() == 128 + 4);
}

TEST_CASE("npy reader rejects malformed files") {
  std::string bad = k23;
  bad[0] = '\0';
  CHECK(code_of([&] { read_npy(bad); }) == Errc::BadMagic);

  bad = k23;
  bad[6] = '\x03';
  CHECK(code_of([&] { read_npy(bad); }) == Errc::UnsupportedVersion);

  bad = k23;
  bad.replace(bad.find("<f4"), 3, "<i4");
  CHECK(code_of([&] { read_npy(bad); }) == Errc::UnsupportedDtype);

  bad = k23;
  bad.replace(bad.find("False"), 5, "True ");
  CHECK(code_of([&] { read_npy(bad); }) == Errc::FortranOrderUnsupported);

  const std::size_t shape3[] = {3};
  CHECK(code_of([&] { read_npy(write_npy_array(shape3, iota(3))); }) == Errc::ShapeRankUnsupported);
  CHECK(code_of([&] { read_npy_tensor(k23); }) == Errc::ShapeRankUnsupported);

  CHECK(code_of([&] { read_npy(k23.substr(0, k23.size() - 1)); }) == Errc::TruncatedPayload);
  CHECK(code_of([&] { read_npy(k23.substr(0, 40)); }) != Errc::InvalidArgument);
}

TEST_CASE("ppm codec") {
  SUBCASE("white pixel round trip") {
    const RgbMapBatch white(Tensor4::filled({1, 3, 1, 1}, 1.0f));
    const std::string bytes = write_image_ppm(white, 0);
    CHECK(bytes == std::string("P6\n1 1\n255\n\xff\xff\xff"));
    CHECK(read_image_ppm(bytes) == white.maps());
  }
  SUBCASE("half rounds up and channels interleave") {
    const RgbMapBatch m(Tensor4({1, 3, 1, 2}, {0.5f, 0.0f, 1.0f, 0.2f, 0.0f, 0.0f}));
    CHECK(write_image_ppm(m, 0) == "P6\n2 1\n255\n\x80\xff\x00\x00\x33\x00"s);
  }
  SUBCASE("quantization error is at most half a step") {
    toy::Rng rng(62);
    const RgbMapBatch m(toy::random_tensor(rng, {2, 3, 5, 7}, 0.0f, 1.0f));
    const Tensor4 back = read_image_ppm(write_image_ppm(m, 1));
    CHECK(back.shape() == Shape4{1, 3, 5, 7});
    const Tensor4 want = toy::slice_batch(m.maps(), 1);
    for (std::size_t i = 0; i < back.size(); ++i)
      CHECK(std::abs(back.values()[i] - want.values()[i]) <= 0.5 / 255 + 1e-7);
  }
  SUBCASE("comments in the header") {
    const Tensor4 t = read_image_ppm("P6 # made by hand\n1 1\n255\n\x00\x80\xff"s);
    CHECK(t.vector() == std::vector<float>{0.0f, 128.0f / 255.0f, 1.0f});
  }
  CHECK(code_of([] { read_image_ppm("P3\n1 1\n255\n"); }) == Errc::BadHeader);
  CHECK(code_of([] { read_image_ppm("P6\n1 1\n65535\n"); }) == Errc::BadHeader);
  CHECK(code_of([] { read_image_ppm("P6\n2 1\n255\n\x01\x02\x03"s); }) == Errc::TruncatedPixels);
}

TEST_CASE("activation manifests") {
  ScratchDir dir("prism-test-io-manifest");
  toy::Rng rng(63);

  SUBCASE("single layer") {
    ActivationStack s;
    s.push("only", toy::random_tensor(rng, {1, 4, 2, 2}));
    const auto path = write_manifest(dir.path, s);
    const auto back = read_manifest(path);
    REQUIRE(back.stack.size() == 1);
    CHECK(back.stack.deepest().name == "only");
    CHECK(back.stack.deepest().activations == s.deepest().activations);
    CHECK_FALSE(back.input.has_value());
  }
  SUBCASE("declared shape must match the file") {
    write_file_bytes(dir.path / "a.npy", write_npy(Tensor4::zeros({1, 4, 2, 2})));
    write_file_bytes(dir.path / "manifest.json",
                     R"({"layers": [{"name": "a", "file": "a.npy", "shape": [1, 4, 3, 2]}]})");
    CHECK(code_of([&] { read_manifest(dir.path / "manifest.json"); }) == Errc::ManifestShapeMismatch);
  }
  SUBCASE("missing layer file") {
    write_file_bytes(dir.path / "manifest.json",
                     R"({"layers": [{"name": "a", "file": "gone.npy", "shape": [1, 1, 1, 1]}]})");
    try {
      read_manifest(dir.path / "manifest.json");
      FAIL("expected MissingFile");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MissingFile);
      CHECK(std::string(e.what()).find("gone.npy") != std::string::npos);
    }
    CHECK(code_of([&] { read_manifest(dir.path / "nothing.json"); }) == Errc::MissingFile);
  }
  SUBCASE("batch sizes must agree") {
    write_file_bytes(dir.path / "a.npy", write_npy(Tensor4::zeros({2, 1, 2, 2})));
    write_file_bytes(dir.path / "b.npy", write_npy(Tensor4::zeros({3, 1, 1, 1})));
    write_file_bytes(dir.path / "manifest.json",
                     R"({"layers": [{"name": "a", "file": "a.npy", "shape": [2, 1, 2, 2]},
                                    {"name": "b", "file": "b.npy", "shape": [3, 1, 1, 1]}]})");
    CHECK(code_of([&] { read_manifest(dir.path / "manifest.json"); }) == Errc::BatchSizeMismatch);
  }
  SUBCASE("malformed json") {
    write_file_bytes(dir.path / "manifest.json", "{\"layers\": [");
    CHECK(code_of([&] { read_manifest(dir.path / "manifest.json"); }) == Errc::ParseError);
  }
  SUBCASE("maps from a manifest equal maps from a live session") {
    RecordingSession session(toy::toy_model(rng));
    session.register_hooks();
    const Tensor4 input = toy::random_tensor(rng, {2, 3, 16, 16}, 0.0f, 1.0f);
    session.forward(input);
    const auto path = write_manifest(dir.path, session.stack(), input);
    const auto back = read_manifest(path);
    REQUIRE(back.input.has_value());
    CHECK(*back.input == input);
    const auto from_file = compute_prism(back.stack, 16, 16);
    const auto live = session.get_maps(16, 16);
    for (std::size_t i = 0; i < live.maps().size(); ++i)
      CHECK(std::abs(from_file.maps().values()[i] - live.maps().values()[i]) <= 1e-5);
  }
}

TEST_CASE("model files round trip") {
  ScratchDir dir("prism-test-io-model");
  toy::Rng rng(64);
  const Model model = toy::random_model(rng, 3, 16, 16, 7);
  const auto path = save_model(dir.path, model);
  const Model back = load_model(path);
  REQUIRE(back.size() == model.size());
  const Tensor4 x = toy::random_tensor(rng, {1, 3, 16, 16});
  CHECK(run_model(back, x) == run_model(model, x));
  CHECK(fs::exists(dir.path / "conv0_weights.npy"));
  CHECK(read_npy_array(read_file_bytes(dir.path / "conv0_bias.npy")).shape.size() == 1);
}
