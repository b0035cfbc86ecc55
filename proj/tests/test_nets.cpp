#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <numeric>

#include "holo/nets.hpp"
#include "holo/rng.hpp"

using namespace holo;
using namespace holo::nets;
namespace fs = std::filesystem;

namespace {

struct Row {
  LayerKind kind;
  int k, c_in, c_out;
  Norm norm;
  Act act;
  bool star;
};

// Generator table (super-resolution block included).
const std::vector<Row> kGeneratorRows = {
    {LayerKind::conv2d, 5, 2, 32, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 32, 32, Norm::batch_norm, Act::relu, false},
    {LayerKind::max_pool2d, 2, 0, 0, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 32, 64, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 64, 64, Norm::batch_norm, Act::relu, false},
    {LayerKind::max_pool2d, 2, 0, 0, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 64, 128, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 128, 128, Norm::batch_norm, Act::relu, false},
    {LayerKind::max_pool2d, 2, 0, 0, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 128, 128, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 128, 16, Norm::batch_norm, Act::tanh, false},
    {LayerKind::conv2d, 3, 16, 128, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 128, 128, Norm::batch_norm, Act::relu, false},
    {LayerKind::transposed_conv2d, 2, 128, 128, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 128, 64, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 64, 64, Norm::batch_norm, Act::relu, false},
    {LayerKind::transposed_conv2d, 2, 64, 64, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 64, 32, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 32, 32, Norm::batch_norm, Act::relu, false},
    {LayerKind::transposed_conv2d, 2, 32, 32, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 32, 16, Norm::batch_norm, Act::relu, true},
    {LayerKind::conv2d, 3, 16, 16, Norm::batch_norm, Act::relu, true},
    {LayerKind::transposed_conv2d, 2, 16, 16, Norm::none, Act::none, true},
    {LayerKind::conv2d, 3, 16, 16, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 16, 16, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 16, 2, Norm::none, Act::none, false},
};

const std::vector<Row> kDiscriminatorRows = {
    {LayerKind::conv2d, 5, 2, 32, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 32, 32, Norm::batch_norm, Act::relu, false},
    {LayerKind::max_pool2d, 2, 0, 0, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 32, 64, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 64, 64, Norm::batch_norm, Act::relu, false},
    {LayerKind::max_pool2d, 2, 0, 0, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 64, 128, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 128, 128, Norm::batch_norm, Act::relu, false},
    {LayerKind::max_pool2d, 2, 0, 0, Norm::none, Act::none, false},
    {LayerKind::conv2d, 3, 128, 128, Norm::batch_norm, Act::relu, false},
    {LayerKind::conv2d, 3, 128, 16, Norm::batch_norm, Act::none, false},
    {LayerKind::global_pool2d, 0, 0, 0, Norm::none, Act::none, false},
    {LayerKind::dense, 1, 16, 1, Norm::none, Act::none, false},
};

void audit(const std::vector<LayerSpec>& specs, const std::vector<Row>& rows) {
  REQUIRE(specs.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    INFO("layer ", i, " (", specs[i].name, ")");
    CHECK(specs[i].kind == rows[i].kind);
    if (rows[i].kind == LayerKind::conv2d || rows[i].kind == LayerKind::transposed_conv2d) {
      CHECK(specs[i].k1 == rows[i].k);
      CHECK(specs[i].k2 == rows[i].k);
      CHECK(specs[i].c_in == rows[i].c_in);
      CHECK(specs[i].c_out == rows[i].c_out);
    }
    if (rows[i].kind == LayerKind::transposed_conv2d) CHECK(specs[i].stride == 2);
    if (rows[i].kind == LayerKind::conv2d) CHECK(specs[i].stride == 1);
    CHECK(specs[i].normalization == rows[i].norm);
    CHECK(specs[i].activation == rows[i].act);
    CHECK(specs[i].super_resolution_flag == rows[i].star);
  }
}

// Trainable parameter count per the table rows.
size_t analytic_trainable(const std::vector<Row>& rows) {
  size_t n = 0;
  for (const auto& r : rows) {
    switch (r.kind) {
      case LayerKind::conv2d:
        n += size_t(r.k) * r.k * r.c_in * r.c_out + r.c_out;
        if (r.norm == Norm::batch_norm) n += 2 * size_t(r.c_out);
        break;
      case LayerKind::transposed_conv2d:
        n += size_t(r.k) * r.k * r.c_in * r.c_out + r.c_out;
        break;
      case LayerKind::dense: n += size_t(r.c_in) * r.c_out + r.c_out; break;
      default: break;
    }
  }
  return n;
}

size_t analytic_persisted(const std::vector<Row>& rows) {
  size_t n = analytic_trainable(rows);
  for (const auto& r : rows)
    if (r.kind == LayerKind::conv2d && r.norm == Norm::batch_norm)
      n += 2 * size_t(r.c_out);  // running statistics
  return n;
}

Tensor<float> random_input(int n, int h, int w, int c, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<float> t(n, h, w, c);
  for (size_t i = 0; i < t.size(); ++i) t[i] = float(rng.uniform(-1.0, 1.0));
  return t;
}

fs::path temp_dir(const char* leaf) {
  const auto dir = fs::temp_directory_path() / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("generator conforms to the architecture table") {
  audit(generator_specs(true), kGeneratorRows);

  // Starred rows are exactly the super-resolution block.
  int starred = 0;
  for (const auto& s : generator_specs(true)) starred += s.super_resolution_flag;
  CHECK(starred == 3);

  // Without super-resolution the starred block disappears and the tail
  // adapts its input width; 3 pools match 3 transposed convolutions.
  const auto base = generator_specs(false);
  CHECK(base.size() == kGeneratorRows.size() - 3);
  int pools = 0, ups = 0;
  for (const auto& s : base) {
    pools += s.kind == LayerKind::max_pool2d;
    ups += s.kind == LayerKind::transposed_conv2d;
  }
  CHECK(pools == 3);
  CHECK(ups == 3);
}

TEST_CASE("discriminator conforms to the architecture table") {
  audit(discriminator_specs(), kDiscriminatorRows);
}

TEST_CASE("generator output shapes: 2x with SR, 1x without") {
  auto g_sr = build_generator<float>(true, 1);
  const auto in = random_input(1, 64, 64, 2, 3);
  const auto& out = g_sr.forward(in, false);
  CHECK(out.n() == 1);
  CHECK(out.h() == 128);
  CHECK(out.w() == 128);
  CHECK(out.c() == 2);
  for (size_t i = 0; i < out.size(); ++i) REQUIRE(std::isfinite(out[i]));

  auto g = build_generator<float>(false, 1);
  const auto& out2 = g.forward(in, false);
  CHECK(out2.h() == 64);
  CHECK(out2.w() == 64);
  CHECK(out2.c() == 2);
}

TEST_CASE("non-divisible input dimensions raise a dimension error") {
  auto g = build_generator<float>(false, 1);
  const auto in = random_input(1, 20, 20, 2, 3);  // 20 -> 10 -> 5: pool fails
  CHECK_THROWS_AS(g.forward(in, false), DimensionError);
}

TEST_CASE("discriminator maps 2-channel input to one score") {
  auto d = build_discriminator<float>(5);
  const auto in = random_input(1, 64, 64, 2, 9);
  const auto& s = d.forward(in, false);
  CHECK(s.n() == 1);
  CHECK(s.h() == 1);
  CHECK(s.w() == 1);
  CHECK(s.c() == 1);

  // All-zero parameters give score 0 (sigmoid 0.5 inside the loss).
  for (auto* p : d.params()) p->value.zero();
  const auto& z = d.forward(in, false);
  CHECK(z[0] == 0.0f);
}

TEST_CASE("seeded initialization is deterministic") {
  auto a = build_generator<float>(true, 77);
  auto b = build_generator<float>(true, 77);
  auto c = build_generator<float>(true, 78);
  CHECK(flatten_params(a) == flatten_params(b));
  CHECK(flatten_params(a) != flatten_params(c));
}

TEST_CASE("evaluation-mode forward is deterministic") {
  auto g = build_generator<float>(true, 3);
  const auto in = random_input(1, 16, 16, 2, 4);
  const auto out1 = g.forward(in, false);  // copy
  const Tensor<float> first = out1;
  const auto& out2 = g.forward(in, false);
  REQUIRE(first.size() == out2.size());
  for (size_t i = 0; i < first.size(); ++i) CHECK(first[i] == out2[i]);
}

TEST_CASE("flatten length equals the analytic parameter count") {
  auto g = build_generator<float>(true, 1);
  CHECK(flatten_params(g).size() == analytic_trainable(kGeneratorRows));
  auto d = build_discriminator<float>(1);
  CHECK(flatten_params(d).size() == analytic_trainable(kDiscriminatorRows));
}

TEST_CASE("checkpoint round trip is bitwise and validated") {
  const auto dir = temp_dir("holo_nets_ckpt");
  auto g = build_generator<float>(true, 11);
  persist_params(g, dir / "ck", {42, 11});

  auto g2 = build_generator<float>(true, 99);
  const auto meta = load_params(g2, dir / "ck");
  CHECK(meta.iteration == 42);
  CHECK(meta.seed == 11);
  CHECK(flatten_params(g) == flatten_params(g2));

  // Bitwise: running statistics too.
  auto pa = g.params();
  auto pb = g2.params();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i)
    for (size_t j = 0; j < pa[i]->value.size(); ++j)
      CHECK(pa[i]->value[j] == pb[i]->value[j]);

  // Loading into a different architecture fails without partial writes.
  auto d = build_discriminator<float>(5);
  const auto before = flatten_params(d);
  CHECK_THROWS_AS(load_params(d, dir / "ck"), CheckpointError);
  CHECK(flatten_params(d) == before);

  auto g_nosr = build_generator<float>(false, 5);
  const auto before2 = flatten_params(g_nosr);
  CHECK_THROWS_AS(load_params(g_nosr, dir / "ck"), CheckpointError);
  CHECK(flatten_params(g_nosr) == before2);
}

TEST_CASE("checkpoint size tracks 4 bytes per parameter") {
  const auto dir = temp_dir("holo_nets_size");
  auto g = build_generator<float>(true, 2);
  persist_params(g, dir / "ck", {0, 2});

  size_t blob_bytes = 0, manifest_bytes = 0;
  for (const auto& e : fs::directory_iterator(dir / "ck")) {
    if (e.path().filename() == "manifest.json")
      manifest_bytes = fs::file_size(e.path());
    else
      blob_bytes += fs::file_size(e.path());
  }
  CHECK(blob_bytes == 4 * analytic_persisted(kGeneratorRows));
  CHECK(double(manifest_bytes) < 0.05 * double(blob_bytes));
}

TEST_CASE("generator parameter gradients match central finite differences") {
  // Double-precision instantiation of the full 16x16 network.
  auto g = build_generator<double>(true, 21);
  Rng rng(55);
  Tensor<double> in(1, 16, 16, 2);
  for (size_t i = 0; i < in.size(); ++i) in[i] = rng.uniform(-1.0, 1.0);

  // Loss: fixed random projection of the output (dense dL/dout).
  std::vector<double> proj;
  const auto loss_of = [&](Network<double>& net) {
    const auto& out = net.forward(in, true);
    if (proj.empty()) {
      Rng pr(91);
      proj.resize(out.size());
      for (auto& v : proj) v = pr.uniform(-1.0, 1.0);
    }
    double s = 0.0;
    for (size_t i = 0; i < out.size(); ++i) s += proj[i] * out[i];
    return s;
  };

  const double base = loss_of(g);
  (void)base;
  g.zero_grads();
  const auto& out = g.forward(in, true);
  Tensor<double> gy(out.n(), out.h(), out.w(), out.c());
  for (size_t i = 0; i < gy.size(); ++i) gy[i] = proj[i];
  g.backward(gy, true);

  auto params = g.params();
  // Sample parameters across the depth of the network.
  struct Pick {
    size_t param_idx, elem_idx;
  };
  std::vector<Pick> picks;
  Rng pick_rng(7);
  for (size_t pi = 0; pi < params.size(); pi += 7) {
    if (!params[pi]->trainable || params[pi]->value.empty()) continue;
    picks.push_back({pi, size_t(pick_rng.uniform() * double(params[pi]->value.size()))});
  }
  REQUIRE(picks.size() >= 8);

  const double h = 1e-5;
  for (const auto& pick : picks) {
    auto* p = params[pick.param_idx];
    const double saved = p->value[pick.elem_idx];
    p->value[pick.elem_idx] = saved + h;
    const double up = loss_of(g);
    p->value[pick.elem_idx] = saved - h;
    const double dn = loss_of(g);
    p->value[pick.elem_idx] = saved;
    const double fd = (up - dn) / (2.0 * h);
    const double an = p->grad[pick.elem_idx];
    INFO("param ", pick.param_idx, " (", p->name, ") elem ", pick.elem_idx);
    const double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
    CHECK(std::abs(fd - an) / denom < 1e-3);
  }
}

TEST_CASE("discriminator input gradient matches finite differences") {
  auto d = build_discriminator<double>(33);
  Rng rng(5);
  Tensor<double> in(1, 16, 16, 2);
  for (size_t i = 0; i < in.size(); ++i) in[i] = rng.uniform(-1.0, 1.0);

  const auto& s0 = d.forward(in, true);
  (void)s0;
  Tensor<double> gy(1, 1, 1, 1);
  gy[0] = 1.0;
  const Tensor<double> gin = d.backward_to_input(gy, false);

  const double h = 1e-6;
  Rng pick_rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const size_t i = size_t(pick_rng.uniform() * double(in.size()));
    const double saved = in[i];
    in[i] = saved + h;
    const double up = d.forward(in, true)[0];
    in[i] = saved - h;
    const double dn = d.forward(in, true)[0];
    in[i] = saved;
    const double fd = (up - dn) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(gin[i]), 1e-8});
    CHECK(std::abs(fd - gin[i]) / denom < 1e-3);
  }
}
