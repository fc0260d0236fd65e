#include "prism/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "acceptance.hpp"
#include "prism/error.hpp"
#include "prism/inference.hpp"
#include "prism/manifest.hpp"
#include "prism/npy.hpp"
#include "prism/pca.hpp"
#include "prism/ppm.hpp"

namespace prism::cli {

namespace fs = std::filesystem;

namespace {

struct OutputSize {
  std::size_t h = 0;
  std::size_t w = 0;
};

struct Config {
  std::string activations;
  std::string model;
  std::vector<std::string> images;
  std::string out;
  std::size_t components = 3;
  std::string sharpen = "progressive";
  std::string output_size = "auto";
  bool raw_scores = false;
  bool inject_fault = false;
};

std::optional<OutputSize> parse_output_size(const std::string& text) {
  if (text == "auto") return std::nullopt;
  static const std::regex pattern(R"((\d+)x(\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) {
    throw Error(Errc::InvalidArgument, "--output-size must be HxW or auto, got '" + text + "'");
  }
  OutputSize s{std::stoul(m[1]), std::stoul(m[2])};
  if (s.h == 0 || s.w == 0) throw Error(Errc::InvalidArgument, "--output-size must be at least 1x1");
  return s;
}

PrismOptions prism_options(const Config& cfg) {
  PrismOptions o;
  o.sharpen.mode = parse_sharpen_mode(cfg.sharpen);
  return o;
}

void check_components(const Config& cfg) {
  if (cfg.components == 0) throw Error(Errc::InvalidArgument, "--components must be >= 1");
  if (cfg.components != 3 && !cfg.raw_scores) {
    throw Error(Errc::InvalidArgument,
                "images need exactly 3 components; use --raw-scores for --components " +
                    std::to_string(cfg.components));
  }
}

// Source images for side-by-side output. Values outside [0, 1] (model-normalized
// exports) are min-max rescaled over the whole batch.
Tensor4 displayable(const Tensor4& input) {
  const auto [lo, hi] = std::minmax_element(input.values().begin(), input.values().end());
  if (*lo >= 0.0f && *hi <= 1.0f) return input;
  const float span = *hi - *lo;
  std::vector<float> data = input.vector();
  for (float& x : data) x = span > 0.0f ? (x - *lo) / span : 0.5f;
  return Tensor4(input.shape(), std::move(data));
}

void emit(const fs::path& path, const std::string& bytes, std::ostream& out) {
  write_file_bytes(path, bytes);
  out << path.string() << "\n";
}

void emit_scores(const Config& cfg, const ActivationStack& stack, std::ostream& out) {
  const auto centered = center_columns(reshape_to_observations(stack.deepest().activations));
  const ScoreMaps scores = principal_scores(centered.centered, cfg.components);
  emit(fs::path(cfg.out) / "scores.npy", write_npy(scores.scores), out);
}

void emit_images(const Config& cfg, const ActivationStack& stack, const std::optional<Tensor4>& input,
                 OutputSize size, std::ostream& out, std::ostream& err) {
  const RgbMapBatch maps = compute_prism(stack, size.h, size.w, prism_options(cfg));
  std::optional<RgbMapBatch> shown;
  if (input && input->c() == 3) {
    shown.emplace(displayable(*input));
  } else if (input) {
    err << "prism: warning: input batch has " << input->c() << " channels; input_<i>.ppm not written\n";
  }
  const fs::path dir(cfg.out);
  for (std::size_t i = 0; i < maps.n(); ++i) {
    if (shown) emit(dir / ("input_" + std::to_string(i) + ".ppm"), write_image_ppm(*shown, i), out);
    emit(dir / ("prism_" + std::to_string(i) + ".ppm"), write_image_ppm(maps, i), out);
  }
}

int cmd_map(const Config& cfg, std::ostream& out, std::ostream& err) {
  check_components(cfg);
  const auto explicit_size = parse_output_size(cfg.output_size);
  ManifestContents contents = read_manifest(cfg.activations);
  if (contents.stack.empty()) throw Error(Errc::EmptyStack, "manifest lists no layers");

  OutputSize size;
  if (explicit_size) {
    size = *explicit_size;
  } else if (contents.input) {
    size = {contents.input->h(), contents.input->w()};
  } else {
    const Tensor4& first = contents.stack.shallowest().activations;
    size = {first.h() * 8, first.w() * 8};
  }
  fs::create_directories(cfg.out);
  if (cfg.raw_scores) emit_scores(cfg, contents.stack, out);
  if (cfg.components == 3) emit_images(cfg, contents.stack, contents.input, size, out, err);
  return kOk;
}

int cmd_run(const Config& cfg, std::ostream& out, std::ostream& err) {
  check_components(cfg);
  const auto explicit_size = parse_output_size(cfg.output_size);
  Model model = load_model(cfg.model);

  std::vector<float> data;
  Shape4 batch_shape{0, 3, 0, 0};
  for (const auto& path : cfg.images) {
    const Tensor4 img = read_image_ppm(read_file_bytes(path));
    if (batch_shape.n == 0) {
      batch_shape.h = img.h();
      batch_shape.w = img.w();
    } else if (img.h() != batch_shape.h || img.w() != batch_shape.w) {
      throw Error(Errc::ShapeMismatch, "image '" + path + "' is " + std::to_string(img.w()) + "x" +
                                           std::to_string(img.h()) + ", expected " +
                                           std::to_string(batch_shape.w) + "x" + std::to_string(batch_shape.h));
    }
    data.insert(data.end(), img.values().begin(), img.values().end());
    ++batch_shape.n;
  }
  const Tensor4 batch(batch_shape, std::move(data));

  RecordingSession session(std::move(model));
  session.register_hooks();
  session.forward(batch);
  if (session.stack().empty()) throw Error(Errc::EmptyStack, "model has no convolution layers to record");

  const OutputSize size = explicit_size.value_or(OutputSize{batch.h(), batch.w()});
  fs::create_directories(cfg.out);
  if (cfg.raw_scores) emit_scores(cfg, session.stack(), out);
  if (cfg.components == 3) emit_images(cfg, session.stack(), batch, size, out, err);
  session.prune();
  return kOk;
}

int cmd_selftest(const Config& cfg, std::ostream& out) {
  acceptance::Config ac;
  ac.mode = parse_sharpen_mode(cfg.sharpen);
  ac.inject_fault = cfg.inject_fault;
  ac.run_cli = [](const std::vector<std::string>& args) {
    std::ostringstream sink_out;
    std::ostringstream sink_err;
    return run(args, sink_out, sink_err);
  };
  ac.scratch = fs::temp_directory_path() / ("prism-selftest-" + std::to_string(::getpid()));
  const auto results = acceptance::run_all(ac);
  std::size_t passed = 0;
  for (const auto& r : results) {
    out << acceptance::format(r) << "\n";
    passed += r.passed ? 1 : 0;
  }
  out << passed << "/" << results.size() << " checks passed (sharpen=" << cfg.sharpen << ")\n";
  return passed == results.size() ? kOk : kCheckFailed;
}

void add_map_options(CLI::App& sub, Config& cfg) {
  sub.add_option("--out", cfg.out, "Output directory")->required();
  sub.add_option("--components", cfg.components, "Principal components to keep (images need 3)")
      ->capture_default_str();
  sub.add_option("--sharpen", cfg.sharpen, "Sharpening mode")
      ->check(CLI::IsMember({"progressive", "last-only"}))
      ->capture_default_str();
  sub.add_option("--output-size", cfg.output_size, "Output size HxW, or auto")->capture_default_str();
  sub.add_flag("--raw-scores", cfg.raw_scores, "Also write the principal scores as scores.npy");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"prism: principal image sections maps for CNN activations", "prism"};
  app.require_subcommand(1);

  auto* map = app.add_subcommand("map", "Compute maps from an activation manifest");
  map->add_option("--activations", cfg.activations, "Path to manifest.json")->required();
  add_map_options(*map, cfg);

  auto* run_cmd = app.add_subcommand("run", "Run a model on PPM images and compute their maps");
  run_cmd->add_option("--model", cfg.model, "Path to model.json")->required();
  run_cmd->add_option("--images", cfg.images, "Input images (binary PPM, equal sizes)")->required()->expected(1, -1);
  add_map_options(*run_cmd, cfg);

  auto* selftest = app.add_subcommand("selftest", "Run the built-in acceptance checks");
  selftest->add_option("--sharpen", cfg.sharpen, "Sharpening mode")
      ->check(CLI::IsMember({"progressive", "last-only"}))
      ->capture_default_str();
  selftest->add_flag("--inject-fault", cfg.inject_fault)->group("");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (map->parsed()) return cmd_map(cfg, out, err);
    if (run_cmd->parsed()) return cmd_run(cfg, out, err);
    return cmd_selftest(cfg, out);
  } catch (const Error& e) {
    err << "prism: error: " << e.what() << "\n";
    return is_pipeline_error(e.code()) ? kPipelineError : kInputError;
  } catch (const std::exception& e) {
    err << "prism: error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace prism::cli
