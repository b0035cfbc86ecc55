#include "holo/nets.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

#include "holo/errors.hpp"

namespace holo::nets {

namespace {

using nlohmann::json;

LayerSpec conv(std::string name, int k, int c_in, int c_out, Act act = Act::relu,
               Norm norm = Norm::batch_norm, bool star = false) {
  LayerSpec s;
  s.name = std::move(name);
  s.kind = LayerKind::conv2d;
  s.k1 = s.k2 = k;
  s.c_in = c_in;
  s.c_out = c_out;
  s.stride = 1;
  s.normalization = norm;
  s.activation = act;
  s.super_resolution_flag = star;
  return s;
}

LayerSpec convT(std::string name, int ch, bool star = false) {
  LayerSpec s;
  s.name = std::move(name);
  s.kind = LayerKind::transposed_conv2d;
  s.k1 = s.k2 = 2;
  s.c_in = ch;
  s.c_out = ch;
  s.stride = 2;
  s.super_resolution_flag = star;
  return s;
}

LayerSpec pool(std::string name) {
  LayerSpec s;
  s.name = std::move(name);
  s.kind = LayerKind::max_pool2d;
  s.k1 = s.k2 = 2;
  s.stride = 2;
  return s;
}

}  // namespace

std::vector<LayerSpec> generator_specs(bool sr_enabled) {
  std::vector<LayerSpec> g;
  // encoder
  g.push_back(conv("g00_conv", 5, 2, 32));
  g.push_back(conv("g01_conv", 3, 32, 32));
  g.push_back(pool("g02_pool"));
  g.push_back(conv("g03_conv", 3, 32, 64));
  g.push_back(conv("g04_conv", 3, 64, 64));
  g.push_back(pool("g05_pool"));
  g.push_back(conv("g06_conv", 3, 64, 128));
  g.push_back(conv("g07_conv", 3, 128, 128));
  g.push_back(pool("g08_pool"));
  g.push_back(conv("g09_conv", 3, 128, 128));
  g.push_back(conv("g10_conv", 3, 128, 16, Act::tanh));
  // decoder
  g.push_back(conv("g11_conv", 3, 16, 128));
  g.push_back(conv("g12_conv", 3, 128, 128));
  g.push_back(convT("g13_convT", 128));
  g.push_back(conv("g14_conv", 3, 128, 64));
  g.push_back(conv("g15_conv", 3, 64, 64));
  g.push_back(convT("g16_convT", 64));
  g.push_back(conv("g17_conv", 3, 64, 32));
  g.push_back(conv("g18_conv", 3, 32, 32));
  g.push_back(convT("g19_convT", 32));
  if (sr_enabled) {
    g.push_back(conv("g20_conv_sr", 3, 32, 16, Act::relu, Norm::batch_norm, true));
    g.push_back(conv("g21_conv_sr", 3, 16, 16, Act::relu, Norm::batch_norm, true));
    g.push_back(convT("g22_convT_sr", 16, true));
    g.push_back(conv("g23_conv", 3, 16, 16));
  } else {
    // Without the starred block the tail adapts its input width.
    g.push_back(conv("g23_conv", 3, 32, 16));
  }
  g.push_back(conv("g24_conv", 3, 16, 16));
  g.push_back(conv("g25_conv", 3, 16, 2, Act::none, Norm::none));
  validate_stack(g);
  return g;
}

std::vector<LayerSpec> discriminator_specs() {
  std::vector<LayerSpec> d;
  d.push_back(conv("d00_conv", 5, 2, 32));
  d.push_back(conv("d01_conv", 3, 32, 32));
  d.push_back(pool("d02_pool"));
  d.push_back(conv("d03_conv", 3, 32, 64));
  d.push_back(conv("d04_conv", 3, 64, 64));
  d.push_back(pool("d05_pool"));
  d.push_back(conv("d06_conv", 3, 64, 128));
  d.push_back(conv("d07_conv", 3, 128, 128));
  d.push_back(pool("d08_pool"));
  d.push_back(conv("d09_conv", 3, 128, 128));
  d.push_back(conv("d10_conv", 3, 128, 16, Act::none));
  LayerSpec gp;
  gp.name = "d11_gpool";
  gp.kind = LayerKind::global_pool2d;
  d.push_back(gp);
  LayerSpec fc;
  fc.name = "d12_dense";
  fc.kind = LayerKind::dense;
  fc.k1 = fc.k2 = 1;
  fc.c_in = 16;
  fc.c_out = 1;
  d.push_back(fc);
  validate_stack(d);
  return d;
}

namespace {

json spec_to_json(const LayerSpec& s) {
  return json{{"name", s.name},
              {"kind", to_string(s.kind)},
              {"kernel", {s.k1, s.k2}},
              {"channels", {s.c_in, s.c_out}},
              {"stride", s.stride},
              {"normalization", to_string(s.normalization)},
              {"activation", to_string(s.activation)},
              {"super_resolution", s.super_resolution_flag}};
}

void write_blob(const std::filesystem::path& path, const Tensor<float>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  static_assert(sizeof(float) == 4);
  os.write(reinterpret_cast<const char*>(t.data()), std::streamsize(t.size() * 4));
  if (!os) throw IoError("write failed: " + path.string());
}

void read_blob(const std::filesystem::path& path, Tensor<float>& t) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("missing tensor blob: " + path.string());
  is.read(reinterpret_cast<char*>(t.data()), std::streamsize(t.size() * 4));
  if (!is || is.gcount() != std::streamsize(t.size() * 4))
    throw CheckpointError("truncated tensor blob: " + path.string());
  char extra;
  if (is.read(&extra, 1))
    throw CheckpointError("oversized tensor blob: " + path.string());
}

}  // namespace

void persist_params(Network<float>& net, const std::filesystem::path& dir,
                    const CheckpointMeta& meta) {
  namespace fs = std::filesystem;
  const fs::path tmp = dir.string() + ".tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  json manifest;
  manifest["format"] = "holo-checkpoint-1";
  manifest["iteration"] = meta.iteration;
  manifest["seed"] = meta.seed;
  json jlayers = json::array();
  auto layers = net.layers();
  for (auto* layer : layers) {
    json jl = spec_to_json(layer->spec());
    json jt = json::array();
    for (auto* p : layer->params()) {
      const auto sh = p->value.shape();
      const std::string file = layer->spec().name + "." + p->name + ".bin";
      jt.push_back(json{{"name", p->name},
                        {"shape", {sh[0], sh[1], sh[2], sh[3]}},
                        {"dtype", "f32"},
                        {"trainable", p->trainable},
                        {"file", file}});
      write_blob(tmp / file, p->value);
    }
    jl["tensors"] = std::move(jt);
    jlayers.push_back(std::move(jl));
  }
  manifest["layers"] = std::move(jlayers);

  std::ofstream os(tmp / "manifest.json");
  if (!os) throw IoError("cannot write manifest");
  os << manifest.dump(2) << "\n";
  os.close();

  fs::remove_all(dir);
  fs::rename(tmp, dir);
}

CheckpointMeta load_params(Network<float>& net, const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw CheckpointError("missing manifest: " + (dir / "manifest.json").string());
  json manifest;
  try {
    is >> manifest;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt manifest: ") + e.what());
  }
  if (manifest.value("format", "") != "holo-checkpoint-1")
    throw CheckpointError("unknown checkpoint format");

  auto layers = net.layers();
  const auto& jlayers = manifest.at("layers");
  if (jlayers.size() != layers.size())
    throw CheckpointError("checkpoint has a different layer count");

  // Validate everything and stage the data before touching the network.
  std::vector<std::pair<Param<float>*, Tensor<float>>> staged;
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& jl = jlayers[i];
    const LayerSpec& s = layers[i]->spec();
    if (jl.at("kind").get<std::string>() != to_string(s.kind) ||
        jl.at("channels")[0].get<int>() != s.c_in ||
        jl.at("channels")[1].get<int>() != s.c_out ||
        jl.at("kernel")[0].get<int>() != s.k1 || jl.at("kernel")[1].get<int>() != s.k2)
      throw CheckpointError("architecture mismatch at layer " + s.name);
    auto params = layers[i]->params();
    const auto& jt = jl.at("tensors");
    if (jt.size() != params.size())
      throw CheckpointError("tensor count mismatch at layer " + s.name);
    for (size_t t = 0; t < params.size(); ++t) {
      if (jt[t].at("name").get<std::string>() != params[t]->name)
        throw CheckpointError("tensor name mismatch at layer " + s.name);
      const auto sh = params[t]->value.shape();
      for (int d = 0; d < 4; ++d)
        if (jt[t].at("shape")[d].get<int>() != sh[d])
          throw CheckpointError("tensor shape mismatch at layer " + s.name);
      Tensor<float> buf(sh[0], sh[1], sh[2], sh[3]);
      read_blob(dir / jt[t].at("file").get<std::string>(), buf);
      staged.emplace_back(params[t], std::move(buf));
    }
  }
  for (auto& [param, buf] : staged) param->value = std::move(buf);

  CheckpointMeta meta;
  meta.iteration = manifest.value("iteration", std::int64_t(0));
  meta.seed = manifest.value("seed", std::uint64_t(0));
  return meta;
}

namespace {

template <typename T>
std::vector<double> flatten_impl(Network<T>& net) {
  std::vector<double> out;
  out.reserve(net.trainable_count());
  for (auto* p : net.params()) {
    if (!p->trainable) continue;
    for (size_t i = 0; i < p->value.size(); ++i) out.push_back(double(p->value[i]));
  }
  return out;
}

}  // namespace

std::vector<double> flatten_params(Network<float>& net) { return flatten_impl(net); }
std::vector<double> flatten_params(Network<double>& net) { return flatten_impl(net); }

}  // namespace holo::nets
