#include "prism/manifest.hpp"

#include <json.hpp>

#include "prism/error.hpp"
#include "prism/npy.hpp"

namespace prism {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_json_file(const fs::path& path) {
  const std::string text = read_file_bytes(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, "'" + path.string() + "': " + e.what());
  }
}

Shape4 shape_field(const json& entry, const std::string& where) {
  const auto it = entry.find("shape");
  if (it == entry.end() || !it->is_array() || it->size() != 4) {
    throw Error(Errc::ParseError, where + ": \"shape\" must be an array of 4 integers");
  }
  std::size_t d[4];
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& v = (*it)[i];
    if (!v.is_number_unsigned()) {
      throw Error(Errc::ParseError, where + ": \"shape\" entries must be non-negative integers");
    }
    d[i] = v.get<std::size_t>();
  }
  return {d[0], d[1], d[2], d[3]};
}

std::string string_field(const json& entry, const char* key, const std::string& where) {
  const auto it = entry.find(key);
  if (it == entry.end() || !it->is_string()) {
    throw Error(Errc::ParseError, where + ": missing string field \"" + key + "\"");
  }
  return it->get<std::string>();
}

Tensor4 load_checked(const fs::path& base, const json& entry, const std::string& where) {
  const Shape4 declared = shape_field(entry, where);
  const fs::path file = base / string_field(entry, "file", where);
  NpyArray a = read_npy_array(read_file_bytes(file));
  const bool matches = a.shape.size() == 4 && a.shape[0] == declared.n && a.shape[1] == declared.c &&
                       a.shape[2] == declared.h && a.shape[3] == declared.w;
  if (!matches) {
    std::string actual = "(";
    for (std::size_t i = 0; i < a.shape.size(); ++i) actual += (i ? ", " : "") + std::to_string(a.shape[i]);
    throw Error(Errc::ManifestShapeMismatch, where + ": manifest says " + declared.str() + ", '" +
                                                 file.string() + "' holds " + actual + ")");
  }
  return Tensor4(declared, std::move(a.data));
}

std::size_t uint_field(const json& entry, const char* key, std::size_t fallback, const std::string& where) {
  const auto it = entry.find(key);
  if (it == entry.end()) return fallback;
  if (!it->is_number_unsigned()) {
    throw Error(Errc::ParseError, where + ": \"" + key + "\" must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

}  // namespace

ManifestContents read_manifest(const fs::path& path) {
  const json doc = parse_json_file(path);
  const fs::path base = path.parent_path();
  const auto layers = doc.find("layers");
  if (layers == doc.end() || !layers->is_array()) {
    throw Error(Errc::ParseError, "'" + path.string() + "': missing \"layers\" array");
  }

  ManifestContents out;
  for (std::size_t i = 0; i < layers->size(); ++i) {
    const json& entry = (*layers)[i];
    const std::string where = "manifest layer " + std::to_string(i);
    const std::string name = entry.contains("name") ? string_field(entry, "name", where) : "layer" + std::to_string(i);
    out.stack.push(name, load_checked(base, entry, where));
  }
  if (const auto in = doc.find("input"); in != doc.end() && !in->is_null()) {
    Tensor4 input = load_checked(base, *in, "manifest input");
    if (!out.stack.empty() && input.n() != out.stack.batch_size()) {
      throw Error(Errc::BatchSizeMismatch, "manifest input has batch " + std::to_string(input.n()) +
                                               ", layers have " + std::to_string(out.stack.batch_size()));
    }
    out.input = std::move(input);
  }
  return out;
}

fs::path write_manifest(const fs::path& dir, const ActivationStack& stack,
                        const std::optional<Tensor4>& input) {
  fs::create_directories(dir);
  json doc;
  doc["layers"] = json::array();
  std::size_t i = 0;
  for (const auto& layer : stack) {
    const std::string file = "layer" + std::to_string(i++) + ".npy";
    write_file_bytes(dir / file, write_npy(layer.activations));
    const auto& s = layer.activations.shape();
    doc["layers"].push_back({{"name", layer.name}, {"file", file}, {"shape", {s.n, s.c, s.h, s.w}}});
  }
  if (input) {
    write_file_bytes(dir / "input.npy", write_npy(*input));
    const auto& s = input->shape();
    doc["input"] = {{"file", "input.npy"}, {"shape", {s.n, s.c, s.h, s.w}}};
  }
  const fs::path path = dir / "manifest.json";
  write_file_bytes(path, doc.dump(2) + "\n");
  return path;
}

Model load_model(const fs::path& path) {
  const json doc = parse_json_file(path);
  const fs::path base = path.parent_path();
  const auto layers = doc.find("layers");
  if (layers == doc.end() || !layers->is_array()) {
    throw Error(Errc::ParseError, "'" + path.string() + "': missing \"layers\" array");
  }
  Model model;
  for (std::size_t i = 0; i < layers->size(); ++i) {
    const json& entry = (*layers)[i];
    const std::string where = "model layer " + std::to_string(i);
    const std::string kind = string_field(entry, "kind", where);
    if (kind == "relu") {
      model.emplace_back(ReluLayer{});
    } else if (kind == "maxpool") {
      MaxPoolLayer pool;
      pool.geometry.window = uint_field(entry, "window", 2, where);
      pool.geometry.stride = uint_field(entry, "stride", pool.geometry.window, where);
      if (pool.geometry.window == 0 || pool.geometry.stride == 0) {
        throw Error(Errc::ParseError, where + ": maxpool window and stride must be >= 1");
      }
      model.emplace_back(pool);
    } else if (kind == "conv") {
      NpyArray w = read_npy_array(read_file_bytes(base / string_field(entry, "weights_file", where)));
      if (w.shape.size() != 4) {
        throw Error(Errc::ShapeRankUnsupported, where + ": conv weights must be 4-D (out_c, in_c, kh, kw)");
      }
      NpyArray b = read_npy_array(read_file_bytes(base / string_field(entry, "bias_file", where)));
      ConvLayer conv;
      conv.in_c = w.shape[1];
      conv.geometry.out_c = w.shape[0];
      conv.geometry.kh = w.shape[2];
      conv.geometry.kw = w.shape[3];
      conv.geometry.stride = uint_field(entry, "stride", 1, where);
      conv.geometry.padding = uint_field(entry, "padding", 0, where);
      conv.weights = std::move(w.data);
      conv.bias = std::move(b.data);
      try {
        conv.validate();
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.detail());
      }
      model.emplace_back(std::move(conv));
    } else {
      throw Error(Errc::ParseError, where + ": unknown layer kind '" + kind + "'");
    }
  }
  return model;
}

fs::path save_model(const fs::path& dir, const Model& model) {
  fs::create_directories(dir);
  json doc;
  doc["layers"] = json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const LayerSpec& layer = model[i];
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      const auto& g = conv->geometry;
      const std::string wfile = "conv" + std::to_string(i) + "_weights.npy";
      const std::string bfile = "conv" + std::to_string(i) + "_bias.npy";
      const std::size_t wshape[] = {g.out_c, conv->in_c, g.kh, g.kw};
      const std::size_t bshape[] = {g.out_c};
      write_file_bytes(dir / wfile, write_npy_array(wshape, conv->weights));
      write_file_bytes(dir / bfile, write_npy_array(bshape, conv->bias));
      doc["layers"].push_back({{"kind", "conv"},
                               {"weights_file", wfile},
                               {"bias_file", bfile},
                               {"stride", g.stride},
                               {"padding", g.padding}});
    } else if (const auto* pool = std::get_if<MaxPoolLayer>(&layer)) {
      doc["layers"].push_back(
          {{"kind", "maxpool"}, {"window", pool->geometry.window}, {"stride", pool->geometry.stride}});
    } else {
      doc["layers"].push_back({{"kind", "relu"}});
    }
  }
  const fs::path path = dir / "model.json";
  write_file_bytes(path, doc.dump(2) + "\n");
  return path;
}

}  // namespace prism
