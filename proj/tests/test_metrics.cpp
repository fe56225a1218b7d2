#include <doctest.h>

#include <cmath>

#include "depthgaze/metrics.hpp"
#include "depthgaze/random.hpp"
#include "oracles.hpp"

using namespace depthgaze;

namespace {

AnnotationRecord record_at(Point2 gaze, Point2 eye_px = {8, 8}, ImageSize size = {64, 64}) {
  AnnotationRecord r;
  r.image_path = "x.jpg";
  r.image_size = size;
  r.head_box = {0, 0, 16, 16};
  r.eye = eye_px;
  r.gaze_points = {gaze};
  return r;
}

}  // namespace

TEST_CASE("gaussian peak, one-sigma value and mass") {
  const Heatmap h = gaussian_heatmap({0.5, 0.25}, {64, 64}, 3.0);
  CHECK(h(16, 32) == 1.0);
  CHECK(h(16, 35) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(h(19, 32) == doctest::Approx(0.6065).epsilon(1e-4));
  const Heatmap c = gaussian_heatmap({0.5, 0.5}, {64, 64}, 3.0);
  double sum = 0.0;
  for (int r = 0; r < 64; ++r)
    for (int k = 0; k < 64; ++k) sum += c(r, k);
  CHECK(std::abs(sum - 2 * std::numbers::pi * 9) < 0.5);
  CHECK_THROWS_AS(gaussian_heatmap({0.5, 0.5}, {8, 8}, 0.0), ConfigError);
}

TEST_CASE("gaussian strictly decreases along rays from the peak") {
  const Heatmap h = gaussian_heatmap({0.5, 0.5}, {64, 64}, 3.0);
  const int dirs[8][2] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  for (const auto& d : dirs) {
    for (int s = 0; s < 12; ++s) {
      CHECK(h(32 + d[0] * s, 32 + d[1] * s) > h(32 + d[0] * (s + 1), 32 + d[1] * (s + 1)));
    }
  }
}

TEST_CASE("binarization keeps the one-sigma disk") {
  const Heatmap h = gaussian_heatmap({0.5, 0.5}, {64, 64}, 3.0);
  const BinaryMask m = binarize_ground_truth(h);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) CHECK(m.at(r, c) == ((r - 32) * (r - 32) + (c - 32) * (c - 32) <= 9));
}

TEST_CASE("mse examples and oracle") {
  CHECK(mse_heatmap_loss(Heatmap({2, 2}, 0.0), Heatmap({2, 2}, 1.0)) == 4.0);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const ImageSize size{rng.uniform_int(1, 30), rng.uniform_int(1, 30)};
    std::vector<double> a, b;
    for (std::size_t i = 0; i < size.area(); ++i) {
      a.push_back(rng.uniform());
      b.push_back(rng.uniform());
    }
    const Heatmap ha(size, a), hb(size, b);
    CHECK(std::abs(mse_heatmap_loss(ha, hb) - oracle::mse_loop(ha, hb)) <= 1e-12);
    CHECK(mse_heatmap_loss(ha, ha) == 0.0);
  }
  CHECK_THROWS_AS(mse_heatmap_loss(Heatmap({2, 2}), Heatmap({2, 1})), DimensionError);
}

TEST_CASE("auc examples") {
  BinaryMask gt({4, 4});
  gt.set(1, 1);
  gt.set(2, 2);
  CHECK(auc_score(Heatmap::from_mask(gt), gt) == 1.0);
  CHECK(auc_score(Heatmap({4, 4}, 0.3), gt) == 0.5);
  CHECK_THROWS_AS(auc_score(Heatmap({4, 4}), BinaryMask({4, 4})), UndefinedMetricError);
  CHECK_THROWS_AS(auc_score(Heatmap({4, 4}), BinaryMask({4, 4}, true)), UndefinedMetricError);
  CHECK_THROWS_AS(auc_score(Heatmap({4, 4}), BinaryMask({4, 3})), DimensionError);
}

TEST_CASE("auc equals the pairwise ranking probability, is rank-only and reverses") {
  Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    const int n = rng.uniform_int(2, 40);
    std::vector<double> s;
    std::vector<std::uint8_t> l;
    for (int i = 0; i < n; ++i) {
      s.push_back(rng.uniform_int(0, 5) * 0.25);
      l.push_back(rng.uniform() < 0.5);
    }
    l[0] = 1;
    l[1] = 0;
    const double auc = auc_score(s, l);
    CHECK(std::abs(auc - oracle::pairwise_auc(s, l)) <= 1e-9);
    std::vector<double> mono, neg;
    for (double v : s) {
      mono.push_back(std::exp(3 * v) - 7);
      neg.push_back(-v);
    }
    CHECK(auc_score(mono, l) == auc);
    CHECK(std::abs(auc + auc_score(neg, l) - 1.0) <= 1e-9);
  }
}

TEST_CASE("distance examples and properties") {
  CHECK(l2_distance({0.3, 0.3}, {0.3, 0.3}) == 0.0);
  CHECK(l2_distance({0, 0}, {1, 1}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(l2_distance({0.25, 0}, {0, 0}) == 0.25);
  const std::vector<Point2> gts{{0, 0}, {0.5, 0.6}, {1, 1}};
  CHECK(min_distance({0.5, 0.5}, gts) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(min_distance({0.5, 0.6}, gts) == 0.0);
  CHECK(min_distance({0.1, 0.2}, std::vector<Point2>{{0.7, 0.9}}) == l2_distance({0.1, 0.2}, {0.7, 0.9}));
  CHECK_THROWS_AS(min_distance({0, 0}, {}), ArgumentError);

  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const Point2 a{rng.uniform(), rng.uniform()}, b{rng.uniform(), rng.uniform()}, c{rng.uniform(), rng.uniform()};
    CHECK(l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-12);
    CHECK(l2_distance(a, b) == l2_distance(b, a));
    std::vector<Point2> list;
    const int n = rng.uniform_int(1, 10);
    for (int i = 0; i < n; ++i) list.push_back({rng.uniform(), rng.uniform()});
    for (Point2 g : list) CHECK(min_distance(a, list) <= l2_distance(a, g));
  }
}

TEST_CASE("angular error cases") {
  CHECK(angular_error({0.5, 0.5}, {0.9, 0.2}, {0.9, 0.2}) == 0.0);
  CHECK(angular_error({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(angular_error({0.5, 0.5}, {1, 0.5}, {0, 0.5}) == 180.0);
  CHECK_THROWS_AS(angular_error({0.5, 0.5}, {0.5, 0.5}, {0, 0}), DegenerateGazeError);
  CHECK_THROWS_AS(angular_error({0.5, 0.5}, {0, 0}, {0.5, 0.5}), DegenerateGazeError);
  Rng rng(14);
  for (int t = 0; t < 500; ++t) {
    const Point2 e{rng.uniform(), rng.uniform()};
    const Point2 p{rng.uniform(), rng.uniform()};
    const Point2 g{rng.uniform(), rng.uniform()};
    const double a = angular_error(e, p, g);
    CHECK(a >= 0.0);
    CHECK(a <= 180.0);
    const double s = rng.uniform(0.1, 10);
    const Point2 ps{e.x + s * (p.x - e.x), e.y + s * (p.y - e.y)};
    CHECK(std::abs(angular_error(e, ps, g) - a) <= 1e-9);
  }
}

TEST_CASE("argmax takes the first maximum in row-major order") {
  Heatmap h({4, 8}, 0.0);
  h(2, 5) = 3.0;
  h(3, 1) = 3.0;
  CHECK(heatmap_argmax(h) == Point2{5.0 / 8, 2.0 / 4});
}

TEST_CASE("evaluate examples") {
  const Point2 gt{0.5, 0.5};
  const std::vector<AnnotationRecord> one{record_at(gt)};
  const std::vector<Heatmap> perfect{gaussian_heatmap(gt, {64, 64}, 3.0)};
  const EvalReport r = evaluate(perfect, one);
  CHECK(*r.auc == 1.0);
  CHECK(*r.dist == 0.0);
  CHECK(*r.min_dist == 0.0);
  CHECK(r.n_samples == 1);

  const std::vector<AnnotationRecord> two{record_at({0.5, 0.5}), record_at({0.5, 0.5})};
  const std::vector<Heatmap> preds{gaussian_heatmap({0.5, 0.6}, {10, 10}, 1.0),
                                   gaussian_heatmap({0.5, 0.8}, {10, 10}, 1.0)};
  const EvalReport r2 = evaluate(preds, two);
  CHECK(*r2.dist == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate({}, {}), ArgumentError);
}

TEST_CASE("evaluate uses the annotator mean and counts skips") {
  AnnotationRecord multi = record_at({0.25, 0.25});
  multi.gaze_points.push_back({0.5, 0.5});
  AnnotationRecord out = record_at({0.5, 0.5});
  out.in_frame = false;
  AnnotationRecord at_eye = record_at({0.5, 0.5}, {32, 32});
  const std::vector<AnnotationRecord> recs{multi, out, at_eye};
  const std::vector<Heatmap> preds{gaussian_heatmap({0.375, 0.375}, {64, 64}, 3.0),
                                   gaussian_heatmap({0.375, 0.375}, {64, 64}, 3.0),
                                   gaussian_heatmap({0.5, 0.5}, {64, 64}, 3.0)};
  const EvalReport r = evaluate(preds, recs);
  REQUIRE(r.per_record.size() == 3);
  CHECK(*r.per_record[0].dist == 0.0);
  CHECK(*r.per_record[0].min_dist == doctest::Approx(0.125 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(*r.per_record[0].auc == 1.0);
  CHECK_FALSE(r.per_record[1].auc.has_value());
  CHECK_FALSE(r.per_record[2].angular_deg.has_value());
  CHECK(r.n_skipped.auc == 1);
  CHECK(r.n_skipped.dist == 1);
  CHECK(r.n_skipped.min_dist == 1);
  CHECK(r.n_skipped.angular == 2);
  CHECK(r.n_samples == 3);
}
