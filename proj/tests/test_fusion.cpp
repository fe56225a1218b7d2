#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "depthgaze/fusion.hpp"
#include "depthgaze/pipeline.hpp"
#include "depthgaze/random.hpp"
#include "depthgaze/weights.hpp"
#include "oracles.hpp"

using namespace depthgaze;

namespace {

Tensor3 random_tensor(Rng& rng, int c, int h, int w, double lo = -1, double hi = 1) {
  Tensor3 t(c, h, w);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

FaceEmbedding random_face(Rng& rng, int n) {
  FaceEmbedding f;
  for (int i = 0; i < n; ++i) f.values.push_back(rng.uniform(-1, 1));
  return f;
}

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("pool_flatten examples") {
  CHECK(pool_flatten(BinaryMask({4, 4}, true), 2, 2) == std::vector<double>{1, 1, 1, 1});
  BinaryMask one({4, 4});
  one.set(3, 0);
  CHECK(pool_flatten(one, 2, 2) == std::vector<double>{0, 0, 1, 0});
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const ImageSize size{rng.uniform_int(1, 13), rng.uniform_int(1, 13)};
    Grid<double> g(size);
    for (double& v : g.values()) v = rng.uniform();
    const int th = rng.uniform_int(1, 6), tw = rng.uniform_int(1, 6);
    CHECK(pool_flatten(g, th, tw) == oracle::max_pool(g, th, tw));
  }
  Grid<double> six({6, 6});
  for (double& v : six.values()) v = rng.uniform();
  CHECK(pool_flatten(six, 3, 3) == oracle::max_pool(six, 3, 3));
}

TEST_CASE("softmax is stable and normalised") {
  const std::vector<double> big{1000.0, 0.0, 0.0, 0.0};
  const auto p = softmax(big);
  CHECK(std::abs(p[0] - 1.0) < 1e-6);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] < 1e-6);
  CHECK(softmax(std::vector<double>{}).empty());
}

TEST_CASE("attention examples") {
  Rng rng(2);
  const FaceEmbedding face = random_face(rng, 8);
  const std::vector<double> aux(16, 1.0);
  const LinearProjection zero(16, 24);
  const AttentionMap u = attention_weights(face, aux, zero, 4, 4);
  for (double w : u.weights) CHECK(w == doctest::Approx(1.0 / 16).epsilon(1e-15));

  for (int t = 0; t < 100; ++t) {
    const LinearProjection proj = LinearProjection::random(16, 24, rng);
    std::vector<double> x = face.values;
    std::vector<double> a;
    for (int i = 0; i < 16; ++i) a.push_back(rng.uniform());
    x.insert(x.end(), a.begin(), a.end());
    const AttentionMap m = attention_weights(face, a, proj, 4, 4);
    const auto expected = oracle::naive_softmax(oracle::matvec(proj, x));
    for (int i = 0; i < 16; ++i) {
      CHECK(std::abs(m.weights[i] - expected[i]) <= 1e-9);
      CHECK(m.weights[i] > 0.0);
    }
    CHECK(std::abs(sum_of(m.weights) - 1.0) <= 1e-6);
  }
  CHECK_THROWS_AS(attention_weights(face, aux, LinearProjection(16, 23), 4, 4), DimensionError);
  CHECK_THROWS_AS(attention_weights(face, aux, LinearProjection(15, 24), 4, 4), DimensionError);
}

TEST_CASE("modulate examples and properties") {
  Rng rng(3);
  const Tensor3 f = random_tensor(rng, 5, 3, 4);
  const AttentionMap uniform{3, 4, std::vector<double>(12, 0.25)};
  const Tensor3 u = modulate(f, uniform);
  for (std::size_t i = 0; i < f.values().size(); ++i) CHECK(u.values()[i] == f.values()[i] * 0.25);

  AttentionMap hot{3, 4, std::vector<double>(12, 0.0)};
  hot.weights[1 * 4 + 2] = 1.0;
  const Tensor3 o = modulate(f, hot);
  for (int c = 0; c < 5; ++c)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x) CHECK(o(c, y, x) == (y == 1 && x == 2 ? f(c, y, x) : 0.0));

  std::vector<double> z;
  for (int i = 0; i < 12; ++i) z.push_back(rng.uniform(-3, 3));
  const AttentionMap a{3, 4, softmax(z)};
  const Tensor3 m = modulate(f, a);
  double fmax = 0, amax = 0, mmax = 0;
  for (int c = 0; c < 5; ++c)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x) {
        CHECK(std::abs(m(c, y, x) - f(c, y, x) * a.weights[y * 4 + x]) <= 1e-12);
        CHECK(std::signbit(m(c, y, x)) == std::signbit(f(c, y, x)));
        fmax = std::max(fmax, std::abs(f(c, y, x)));
        mmax = std::max(mmax, std::abs(m(c, y, x)));
      }
  for (double w : a.weights) amax = std::max(amax, w);
  CHECK(mmax <= fmax * amax);
  CHECK_THROWS_AS(modulate(f, AttentionMap{4, 3, std::vector<double>(12, 0.1)}), DimensionError);
}

TEST_CASE("concat broadcasts the face embedding per cell") {
  Tensor3 f(1, 1, 2, std::vector<double>{7, 8});
  const auto v = concat_face(f, FaceEmbedding{{1, 2}});
  CHECK(v == std::vector<double>{7, 8, 1, 1, 2, 2});
}

TEST_CASE("fuse with zero encoders returns the decoder bias") {
  Rng rng(4);
  const Tensor3 s = random_tensor(rng, 2, 2, 2), d = random_tensor(rng, 2, 2, 2);
  const FaceEmbedding face = random_face(rng, 3);
  LinearProjection dec = LinearProjection::random(12, 5, rng);
  const Heatmap h = fuse(s, d, face, LinearProjection(5, 20), LinearProjection(5, 20), dec, {3, 4});
  CHECK(h.size() == ImageSize{3, 4});
  for (int i = 0; i < 12; ++i) CHECK(h.values()[i] == dec.bias()[i]);
  CHECK_THROWS_AS(fuse(s, d, face, LinearProjection(5, 20), LinearProjection(5, 20), dec, {4, 4}), DimensionError);
  CHECK_THROWS_AS(fuse(s, d, face, LinearProjection(5, 20), LinearProjection(5, 19), dec, {3, 4}), DimensionError);
}

TEST_CASE("fuse commutes over the two branches and is channel-permutation equivariant") {
  Rng rng(5);
  const int C = 4, h = 2, w = 3, Cf = 2, E = 6;
  const int in = (C + Cf) * h * w;
  const Tensor3 s = random_tensor(rng, C, h, w), d = random_tensor(rng, C, h, w);
  const FaceEmbedding face = random_face(rng, Cf);
  const LinearProjection es = LinearProjection::random(E, in, rng);
  const LinearProjection ed = LinearProjection::random(E, in, rng);
  const LinearProjection dec = LinearProjection::random(10, E, rng);
  const Heatmap base = fuse(s, d, face, es, ed, dec, {2, 5});
  CHECK(fuse(s, s, face, es, es, dec, {2, 5}) == fuse(s, s, face, es, es, dec, {2, 5}));
  const Heatmap swapped = fuse(d, s, face, ed, es, dec, {2, 5});
  for (int i = 0; i < 10; ++i) CHECK(std::abs(swapped.values()[i] - base.values()[i]) <= 1e-12);

  const std::vector<int> perm{2, 0, 3, 1};
  Tensor3 sp(C, h, w), dp(C, h, w);
  LinearProjection esp = es, edp = ed;
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        sp(c, y, x) = s(perm[c], y, x);
        dp(c, y, x) = d(perm[c], y, x);
        const std::size_t dst = (static_cast<std::size_t>(c) * h + y) * w + x;
        const std::size_t src = (static_cast<std::size_t>(perm[c]) * h + y) * w + x;
        for (int e = 0; e < E; ++e) {
          esp.weight(e, dst) = es.weight(e, src);
          edp.weight(e, dst) = ed.weight(e, src);
        }
      }
  const Heatmap permuted = fuse(sp, dp, face, esp, edp, dec, {2, 5});
  for (int i = 0; i < 10; ++i) CHECK(std::abs(permuted.values()[i] - base.values()[i]) <= 1e-9);
}

TEST_CASE("linear projection checks its input") {
  const LinearProjection p(2, 3);
  CHECK_THROWS_AS(p.apply(std::vector<double>{1, 2}), DimensionError);
  CHECK_THROWS_AS(LinearProjection(2, 3, std::vector<double>(5), std::vector<double>(2)), DimensionError);
}

TEST_CASE("weight bundle round trip and corruption") {
  const MmfWeights w = MmfWeights::random({}, 42);
  std::stringstream ss;
  w.to_bundle().write(ss);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "MMFW");
  std::stringstream in(bytes);
  const MmfWeights back = MmfWeights::from_bundle(WeightBundle::read(in));
  CHECK(back.config == w.config);
  CHECK(std::ranges::equal(back.decoder.weights(), w.decoder.weights()));
  CHECK(std::ranges::equal(back.attn_scene.bias(), w.attn_scene.bias()));
  CHECK(std::ranges::equal(back.enc_depth.weights(), w.enc_depth.weights()));

  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream b1(bad);
  CHECK_THROWS_WITH_AS(WeightBundle::read(b1), doctest::Contains("bad weight bundle"), FormatError);
  std::stringstream b2(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(WeightBundle::read(b2), FormatError);

  WeightBundle partial = w.to_bundle();
  WeightBundle missing;
  for (const auto& [name, t] : partial.tensors())
    if (name != "decoder.bias") missing.put(name, t);
  CHECK_THROWS_AS(MmfWeights::from_bundle(missing), FormatError);
}

TEST_CASE("seeded weights are reproducible") {
  const MmfWeights a = MmfWeights::random({}, 7), b = MmfWeights::random({}, 7), c = MmfWeights::random({}, 8);
  CHECK(std::ranges::equal(a.decoder.weights(), b.decoder.weights()));
  CHECK_FALSE(std::ranges::equal(a.decoder.weights(), c.decoder.weights()));
}

namespace {

struct Scene {
  DepthMap depth;
  Tensor3 image;
  PixelBox box;
  GazeAnnotation ann;
};

Scene make_scene(Rng& rng, ImageSize size) {
  Scene s;
  std::vector<double> v(size.area());
  for (double& x : v) x = rng.uniform(5, 40);
  s.box = {rng.uniform_int(0, size.width - 6), rng.uniform_int(0, size.height - 6), 0, 0};
  s.box.x_max = s.box.x_min + rng.uniform_int(2, 6);
  s.box.y_max = s.box.y_min + rng.uniform_int(2, 6);
  for (int r = s.box.y_min; r < s.box.y_max; ++r)
    for (int c = s.box.x_min; c < s.box.x_max; ++c) v[r * size.width + c] = 20.0;
  s.depth = DepthMap(size, v);
  s.image = random_tensor(rng, 3, size.height, size.width, 0, 1);
  s.ann.eye = s.box.center();
  do {
    s.ann.gaze = {std::floor(rng.uniform(0, size.width)), std::floor(rng.uniform(0, size.height))};
  } while (s.ann.gaze == s.ann.eye);
  return s;
}

}  // namespace

TEST_CASE("pipeline matches the composed per-op oracle") {
  Rng rng(9);
  for (int t = 0; t < 25; ++t) {
    const Scene s = make_scene(rng, {24 + t % 5, 32});
    MmfConfig cfg;
    cfg.pool_h = 2 + t % 3;
    cfg.pool_w = 3 + t % 2;
    cfg.heatmap = {16, 20};
    PredictorConfig pc;
    pc.intrinsics = Intrinsics::defaults_for(s.depth.size());
    pc.weights = MmfWeights::random(cfg, 100 + t);
    PipelineInputs in{&s.image, &s.depth, s.box, s.ann, nullptr};
    const Prediction p = pipeline_predict(in, pc);
    const BinaryMask dism = generate_dism(s.depth, s.box, s.ann, pc.intrinsics, pc.dism).mask;
    CHECK(p.dism == dism);
    const oracle::MmfOracle o = oracle::mmf_forward(s.image, s.depth, s.box, dism, *pc.weights);
    REQUIRE(p.heatmap.size() == cfg.heatmap);
    for (std::size_t i = 0; i < o.heatmap.size(); ++i) CHECK(std::abs(p.heatmap.values()[i] - o.heatmap[i]) <= 1e-9);
    REQUIRE(p.trace.has_value());
    CHECK(std::abs(sum_of(p.trace->attn_scene.weights) - 1.0) <= 1e-6);
    CHECK(std::abs(sum_of(p.trace->attn_mask.weights) - 1.0) <= 1e-6);
    for (std::size_t i = 0; i < o.attn_scene.size(); ++i) {
      CHECK(std::abs(p.trace->attn_scene.weights[i] - o.attn_scene[i]) <= 1e-9);
      CHECK(std::abs(p.trace->attn_mask.weights[i] - o.attn_mask[i]) <= 1e-9);
    }
    const Prediction again = pipeline_predict(in, pc);
    CHECK(again.heatmap == p.heatmap);
    CHECK(again.point == p.point);
  }
}

TEST_CASE("default fusion output is 64 x 64") {
  Rng rng(10);
  const Scene s = make_scene(rng, {30, 40});
  PredictorConfig pc;
  pc.intrinsics = Intrinsics::defaults_for(s.depth.size());
  pc.weights = MmfWeights::random({}, 1);
  const Prediction p = pipeline_predict({&s.image, &s.depth, s.box, s.ann, nullptr}, pc);
  CHECK(p.heatmap.size() == ImageSize{64, 64});
}

TEST_CASE("baseline predicts the DISM centroid") {
  const ImageSize size{20, 30};
  const DepthMap depth(size, std::vector<double>(size.area(), 10.0));
  BinaryMask blob(size);
  for (int r = 6; r <= 10; ++r)
    for (int c = 16; c <= 22; ++c) blob.set(r, c);
  PredictorConfig pc;
  pc.intrinsics = Intrinsics::defaults_for(size);
  const Prediction p = pipeline_predict({nullptr, &depth, {0, 0, 4, 4}, {{2, 2}, {19, 8}, {}}, &blob}, pc);
  CHECK(p.point.x == doctest::Approx(19.0 / 30).epsilon(1e-15));
  CHECK(p.point.y == doctest::Approx(8.0 / 20).epsilon(1e-15));
  CHECK_FALSE(p.fallback_center);
  CHECK(p.heatmap.size() == ImageSize{64, 64});

  const BinaryMask none(size);
  const Prediction f = pipeline_predict({nullptr, &depth, {0, 0, 4, 4}, {{2, 2}, {19, 8}, {}}, &none}, pc);
  CHECK(f.point == Point2{0.5, 0.5});
  CHECK(f.fallback_center);
  CHECK(f.empty_dism);

  const BinaryMask wrong({5, 5});
  CHECK_THROWS_AS(pipeline_predict({nullptr, &depth, {0, 0, 4, 4}, {{2, 2}, {19, 8}, {}}, &wrong}, pc),
                  DimensionError);
}
