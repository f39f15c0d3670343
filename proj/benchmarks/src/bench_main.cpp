#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "r2l/config.hpp"
#include "r2l/dsp.hpp"
#include "r2l/graph.hpp"
#include "r2l/pointcloud.hpp"
#include "r2l/rng.hpp"
#include "r2l/scene.hpp"
#include "r2l/sim.hpp"
#include "r2l/unet.hpp"

namespace {

using namespace r2l;

ArraySnapshot fullscale_snapshot() {
  SimConfig cfg;
  Scene sc = gen_scene(1, SceneKind::same);
  auto traj = gen_trajectory(sc, 1, 0.05, 1);
  return radar_snapshot(sc, traj[0], cfg, 1);
}

PointCloud2D random_cloud(size_t n, uint64_t seed) {
  auto rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  PointCloud2D c;
  c.pts.reserve(n);
  for (size_t i = 0; i < n; ++i) c.pts.push_back({u(rng), u(rng)});
  return c;
}

void bench_radar_image(benchmark::State& state) {
  SimConfig cfg;
  ArraySnapshot snap = fullscale_snapshot();
  for (auto _ : state) {
    PolarImage img = radar_image(snap, cfg);
    benchmark::DoNotOptimize(img.data.data());
  }
}
BENCHMARK(bench_radar_image);

void bench_visible_reflectors(benchmark::State& state) {
  SimConfig cfg;
  Scene sc = gen_scene(1, SceneKind::same);
  auto traj = gen_trajectory(sc, 1, 0.05, 1);
  for (auto _ : state) {
    auto refl = visible_reflectors(sc, traj[0], cfg);
    benchmark::DoNotOptimize(refl.data());
  }
}
BENCHMARK(bench_visible_reflectors);

void bench_ca_cfar(benchmark::State& state) {
  SimConfig cfg;
  PolarImage mag = radar_image(fullscale_snapshot(), cfg);
  CfarConfig cc;
  for (auto _ : state) {
    PolarImage det = ca_cfar(mag, cc);
    benchmark::DoNotOptimize(det.data.data());
  }
}
BENCHMARK(bench_ca_cfar);

void bench_nn_distances_grid(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  PointCloud2D a = random_cloud(n, 3);
  PointCloud2D b = random_cloud(n, 4);
  for (auto _ : state) {
    auto d = nn_distances(a, b);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(bench_nn_distances_grid)->Arg(200)->Arg(2000);

void bench_nn_distances_brute(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  PointCloud2D a = random_cloud(n, 3);
  PointCloud2D b = random_cloud(n, 4);
  for (auto _ : state) {
    std::vector<double> d(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec2& q : b.pts) {
        const double dx = a.pts[i].x - q.x, dy = a.pts[i].y - q.y;
        best = std::min(best, dx * dx + dy * dy);
      }
      d[i] = std::sqrt(best);
    }
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(bench_nn_distances_brute)->Arg(200)->Arg(2000);

void bench_conv2d_forward_backward(benchmark::State& state) {
  auto rng = make_rng(7, 0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor<float> x({8, 32, 32}), w({16, 8, 3, 3}), b({16});
  for (auto& v : x.v) v = static_cast<float>(u(rng));
  for (auto& v : w.v) v = static_cast<float>(u(rng));
  Tensor<float> ones;
  for (auto _ : state) {
    Graph<float> g;
    auto xv = g.leaf(x, false);
    auto wv = g.leaf(w, true);
    auto bv = g.leaf(b, true);
    auto out = g.conv2d(xv, wv, bv);
    if (ones.size() == 0) {
      ones = Tensor<float>(g.value(out).shape);
      for (auto& v : ones.v) v = 1.0f;
    }
    auto loss = g.weighted_sum(out, ones);
    g.backward(loss);
    benchmark::DoNotOptimize(g.grad(wv).v.data());
  }
}
BENCHMARK(bench_conv2d_forward_backward);

void bench_unet_forward(benchmark::State& state) {
  AppConfig cfg = toy_config();
  UNet<float> net = UNet<float>::init(cfg.unet, 1);
  auto rng = make_rng(9, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor<float> input({cfg.unet.in_channels(), cfg.unet.n_range, cfg.unet.n_az_in});
  for (auto& v : input.v) v = static_cast<float>(u(rng));
  for (auto _ : state) {
    PolarImage out = unet_infer(net, input, cfg.sim.max_range);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(bench_unet_forward);

}  // namespace

BENCHMARK_MAIN();
