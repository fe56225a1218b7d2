// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary the team.

#include <benchmark/benchmark.h>

#include "depthgaze/dism.hpp"
#include "depthgaze/geometry.hpp"
#include "depthgaze/metrics.hpp"
#include "depthgaze/random.hpp"
#include "depthgaze/serial.hpp"

namespace {

using namespace depthgaze;

DepthMap random_depth(int side, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(side) * side);
  for (double& d : v) d = rng.uniform() < 0.05 ? 0.0 : rng.uniform(1.0, 50.0);
  return DepthMap({side, side}, std::move(v));
}

OrientedCuboid test_cuboid(const PointCloud& cloud) {
  DismParams params;
  return build_cuboid({0.0, 0.0, 10.0}, ImageBin::kLowerRight, DepthBin::kSamePlane, params, cloud.points);
}

void BM_ProjectDepthSerial(benchmark::State& state) {
  const DepthMap d = random_depth(static_cast<int>(state.range(0)), 1);
  const Intrinsics k = Intrinsics::defaults_for(d.size());
  for (auto _ : state) benchmark::DoNotOptimize(serial::project_depth(d, k));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.values().size()));
}

void BM_ProjectDepthParallel(benchmark::State& state) {
  const DepthMap d = random_depth(static_cast<int>(state.range(0)), 1);
  const Intrinsics k = Intrinsics::defaults_for(d.size());
  for (auto _ : state) benchmark::DoNotOptimize(project_depth(d, k));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.values().size()));
}

void BM_FilterPointsSerial(benchmark::State& state) {
  const DepthMap d = random_depth(static_cast<int>(state.range(0)), 2);
  const PointCloud cloud = project_depth(d, Intrinsics::defaults_for(d.size()));
  const OrientedCuboid c = test_cuboid(cloud);
  for (auto _ : state) benchmark::DoNotOptimize(serial::filter_points(cloud.points, c));
}

void BM_FilterPointsParallel(benchmark::State& state) {
  const DepthMap d = random_depth(static_cast<int>(state.range(0)), 2);
  const PointCloud cloud = project_depth(d, Intrinsics::defaults_for(d.size()));
  const OrientedCuboid c = test_cuboid(cloud);
  for (auto _ : state) benchmark::DoNotOptimize(filter_points(cloud.points, c));
}

void BM_ReprojectSerial(benchmark::State& state) {
  const DepthMap d = random_depth(static_cast<int>(state.range(0)), 3);
  const Intrinsics k = Intrinsics::defaults_for(d.size());
  const PointCloud cloud = project_depth(d, k);
  for (auto _ : state) benchmark::DoNotOptimize(serial::reproject_points(cloud.points, k, d.size()));
}

void BM_ReprojectParallel(benchmark::State& state) {
  const DepthMap d = random_depth(static_cast<int>(state.range(0)), 3);
  const Intrinsics k = Intrinsics::defaults_for(d.size());
  const PointCloud cloud = project_depth(d, k);
  for (auto _ : state) benchmark::DoNotOptimize(reproject_points(cloud.points, k, d.size()));
}

struct EvalFixture {
  std::vector<Heatmap> preds;
  std::vector<AnnotationRecord> records;

  explicit EvalFixture(int n) {
    Rng rng(4);
    for (int i = 0; i < n; ++i) {
      Heatmap h({64, 64});
      for (double& v : h.values()) v = rng.uniform();
      preds.push_back(std::move(h));
      AnnotationRecord r;
      r.image_path = "img.jpg";
      r.image_size = {480, 640};
      r.head_box = {10, 10, 40, 40};
      r.eye = {25, 25};
      r.gaze_points = {{rng.uniform(), rng.uniform()}};
      records.push_back(std::move(r));
    }
  }
};

void BM_EvaluateSerial(benchmark::State& state) {
  const EvalFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::evaluate(f.preds, f.records));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const EvalFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(f.preds, f.records));
}

void BM_GaussianSerial(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::gaussian_heatmap({0.3, 0.6}, {side, side}, 3.0));
}

void BM_GaussianParallel(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_heatmap({0.3, 0.6}, {side, side}, 3.0));
}

}  // namespace

BENCHMARK(BM_ProjectDepthSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_ProjectDepthParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_FilterPointsSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_FilterPointsParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_ReprojectSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_ReprojectParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_EvaluateSerial)->Arg(256);
BENCHMARK(BM_EvaluateParallel)->Arg(256);
BENCHMARK(BM_GaussianSerial)->Arg(64)->Arg(512);
BENCHMARK(BM_GaussianParallel)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
