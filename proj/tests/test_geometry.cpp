#include <doctest.h>

#include <set>

#include "depthgaze/geometry.hpp"
#include "depthgaze/random.hpp"
#include "oracles.hpp"

using namespace depthgaze;

TEST_CASE("optical-center pixel projects onto the optical axis") {
  const Intrinsics k{4.0, 4.0, 2.0, 1.0};
  std::vector<double> v(3 * 5, 0.0);
  v[1 * 5 + 2] = 5.0;
  const PointCloud cloud = project_depth(DepthMap({3, 5}, v), k);
  REQUIRE(cloud.points.size() == 1);
  CHECK(cloud.points[0].x == 0.0);
  CHECK(cloud.points[0].y == 0.0);
  CHECK(cloud.points[0].z == 5.0);
  CHECK(cloud.points[0].source == PixelIndex{1, 2});
}

TEST_CASE("pixel one focal length right of centre gives the unit tangent") {
  const Intrinsics k{2.0, 2.0, 1.0, 1.0};
  std::vector<double> v(3 * 4, 0.0);
  v[1 * 4 + 3] = 1.0;
  const auto pts = project_depth(DepthMap({3, 4}, v), k).points;
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].position() == Vec3{1.0, 0.0, 1.0});
}

TEST_CASE("3x3 constant map matches the scalar projection formula") {
  const Intrinsics k{1.0, 1.0, 1.0, 1.0};
  const DepthMap d({3, 3}, std::vector<double>(9, 2.0));
  const auto pts = project_depth(d, k).points;
  REQUIRE(pts.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    const int a = static_cast<int>(i / 3);
    const int b = static_cast<int>(i % 3);
    const auto expected = oracle::project_pixel(a, b, 2.0, k);
    CHECK(pts[i].source == PixelIndex{a, b});
    CHECK(pts[i].x == expected[0]);
    CHECK(pts[i].y == expected[1]);
    CHECK(pts[i].z == 2.0);
    CHECK((pts[i].x == -2.0 || pts[i].x == 0.0 || pts[i].x == 2.0));
  }
}

TEST_CASE("invalid pixels are skipped and order stays row-major") {
  Rng rng(3);
  const DepthMap d = oracle::random_depth(rng, 17, 23, 0.4);
  const auto cloud = project_depth(d, Intrinsics::defaults_for(d.size()));
  CHECK(cloud.points.size() == d.valid_count());
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    CHECK(d.valid(p.source.row, p.source.col));
    CHECK(seen.insert({p.source.row, p.source.col}).second);
    if (i > 0) {
      const auto& q = cloud.points[i - 1].source;
      CHECK(std::pair(q.row, q.col) < std::pair(p.source.row, p.source.col));
    }
  }
}

TEST_CASE("all-invalid map yields an empty cloud") {
  const DepthMap d({4, 4}, std::vector<double>(16, 0.0));
  CHECK(project_depth(d, Intrinsics::defaults_for(d.size())).points.empty());
}

TEST_CASE("depth map rejects negative and non-finite values") {
  CHECK_THROWS_AS(DepthMap({1, 2}, {1.0, -1.0}), InvalidInputError);
  CHECK_THROWS_AS(DepthMap({1, 2}, {1.0, std::nan("")}), InvalidInputError);
  CHECK_THROWS_AS(DepthMap({2, 2}, {1.0, 1.0}), DimensionError);
}

TEST_CASE("default intrinsics and validation") {
  const Intrinsics k = Intrinsics::defaults_for({48, 64});
  CHECK(k == Intrinsics{64.0, 64.0, 32.0, 24.0});
  CHECK_NOTHROW(k.validate({48, 64}));
  CHECK_THROWS_AS((Intrinsics{0.0, 1.0, 1.0, 1.0}).validate({4, 4}), ConfigError);
  CHECK_THROWS_AS((Intrinsics{1.0, 1.0, 10.0, 1.0}).validate({4, 4}), ConfigError);
}

TEST_CASE("reprojecting an optical-axis point hits the optical centre") {
  const Intrinsics k{7.0, 9.0, 3.0, 2.0};
  const Point3 p{0.0, 0.0, 5.0, {}};
  const BinaryMask m = reproject_points(std::span(&p, 1), k, {5, 6});
  CHECK(m.count() == 1);
  CHECK(m.at(2, 3));
}

TEST_CASE("empty point set reprojects to an all-false mask") {
  const BinaryMask m = reproject_points({}, Intrinsics{1, 1, 0, 0}, {3, 3});
  CHECK(m.count() == 0);
  CHECK(m.size() == ImageSize{3, 3});
}

TEST_CASE("reprojection drops out-of-bounds points and rejects z <= 0") {
  const Intrinsics k{1.0, 1.0, 1.0, 1.0};
  std::vector<Point3> pts{{100.0, 0.0, 1.0, {}}, {-5.0, -5.0, 1.0, {}}};
  CHECK(reproject_points(pts, k, {3, 3}).count() == 0);
  pts.push_back({0.0, 0.0, 0.0, {}});
  CHECK_THROWS_AS(reproject_points(pts, k, {3, 3}), InvalidInputError);
  CHECK_THROWS_AS(project_to_pixel({0.0, 0.0, -1.0}, k), InvalidInputError);
}

TEST_CASE("reprojection rounds half to even") {
  const Intrinsics k{1.0, 1.0, 0.0, 0.0};
  CHECK(project_to_pixel({0.5, 1.5, 1.0}, k) == PixelIndex{2, 0});
  CHECK(project_to_pixel({2.5, 3.5, 1.0}, k) == PixelIndex{4, 2});
}

TEST_CASE("round trip reproduces the validity grid") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int h = rng.uniform_int(1, 20);
    const int w = rng.uniform_int(1, 20);
    const DepthMap d = oracle::random_depth(rng, h, w, trial % 2 ? 0.3 : 0.0);
    const Intrinsics k{rng.uniform(0.5, 100.0), rng.uniform(0.5, 100.0), rng.uniform(0.0, w - 1.0),
                       rng.uniform(0.0, h - 1.0)};
    CHECK(reproject_points(project_depth(d, k).points, k, d.size()) == d.validity());
  }
}

TEST_CASE("projection is homogeneous in depth") {
  Rng rng(5);
  const DepthMap d = oracle::random_depth(rng, 12, 9, 0.2);
  const Intrinsics k = Intrinsics::defaults_for(d.size());
  for (double s : {0.01, 0.5, 3.0, 1234.5}) {
    std::vector<double> scaled(d.values().begin(), d.values().end());
    for (double& v : scaled) v *= s;
    const auto a = project_depth(d, k).points;
    const auto b = project_depth(DepthMap(d.size(), scaled), k).points;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(b[i].x == doctest::Approx(a[i].x * s).epsilon(1e-9));
      CHECK(b[i].y == doctest::Approx(a[i].y * s).epsilon(1e-9));
      CHECK(b[i].z == doctest::Approx(a[i].z * s).epsilon(1e-9));
    }
  }
}

TEST_CASE("region depth averages valid pixels only") {
  const DepthMap two({1, 2}, {4.0, 6.0});
  CHECK(face_depth(two, {0, 0, 2, 1}) == 5.0);
  const DepthMap one({1, 1}, {7.0});
  CHECK(face_depth(one, {0, 0, 1, 1}) == 7.0);
  const DepthMap four({2, 2}, {1.0, 2.0, 3.0, 0.0});
  CHECK(face_depth(four, {0, 0, 2, 2}) == 2.0);
  const DepthMap none({2, 2}, {0.0, 0.0, 0.0, 5.0});
  CHECK_THROWS_AS(face_depth(none, {0, 0, 2, 1}), DegenerateRegionError);
  CHECK_THROWS_AS(face_depth(four, {5, 5, 8, 8}), DegenerateRegionError);
}

TEST_CASE("target depth uses a clipped square window") {
  std::vector<double> v(5 * 5);
  for (int i = 0; i < 25; ++i) v[i] = i + 1;
  const DepthMap d({5, 5}, v);
  CHECK(target_depth(d, {2, 2}, 2) == 13.0);
  CHECK(target_depth(d, {0, 0}, 1) == doctest::Approx((1 + 2 + 6 + 7) / 4.0));
  CHECK(target_depth(d, {4, 4}, 0) == 25.0);
}

TEST_CASE("pixel box helpers") {
  const PixelBox b{2, 3, 6, 5};
  CHECK(b.center() == Point2{3.5, 3.5});
  CHECK(b.contains(3, 2));
  CHECK_FALSE(b.contains(5, 2));
  CHECK(b.clipped({4, 4}) == PixelBox{2, 3, 4, 4});
  CHECK((PixelBox{3, 0, 3, 4}).empty());
}
