// Microbenchmarks for the hot paths: scan simulation, nearest neighbors and
// scene synthesis. Run with --benchmark_time_unit=ms for readable output.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "slr/geometry.hpp"
#include "slr/kdtree.hpp"
#include "slr/rng.hpp"
#include "slr/scan.hpp"
#include "slr/scene.hpp"
#include "slr/selection.hpp"
#include "slr/validation.hpp"

namespace {

using slr::PointCloud;
using slr::ScannerConfig;
using slr::SceneConfig;
using slr::Vec3;

/// Ground disk whose lattice holds roughly `millions` million points.
const PointCloud& cached_disk(int millions) {
    static std::vector<std::pair<int, PointCloud>> cache;
    for (const auto& [key, cloud] : cache) {
        if (key == millions) return cloud;
    }
    SceneConfig cfg;
    cfg.grid_spacing = 0.01;
    cfg.disk_radius = std::sqrt(millions * 1e6 * cfg.grid_spacing * cfg.grid_spacing / slr::kPi);
    cfg.ground_z = -1.65;
    cache.emplace_back(millions, slr::generate_dense_scene(cfg));
    return cache.back().second;
}

PointCloud random_box(std::size_t n, double extent, std::uint64_t seed) {
    slr::Rng rng(seed);
    PointCloud c;
    c.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                     rng.uniform(-extent, extent)});
    }
    return c;
}

void BM_ToSpherical(benchmark::State& state) {
    const PointCloud cloud = random_box(100000, 50.0, 1);
    const Vec3 origin{0.1, -0.2, 0.3};
    for (auto _ : state) {
        double acc = 0.0;
        for (const auto& p : cloud.points) acc += slr::to_spherical(p, origin).theta;
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * cloud.size());
}
BENCHMARK(BM_ToSpherical);

void BM_SimulateScan(benchmark::State& state) {
    const PointCloud& cloud = cached_disk(static_cast<int>(state.range(0)));
    ScannerConfig cfg;
    cfg.zenith_max = 135.0;
    cfg.max_range = 120.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(slr::simulate_scan(cloud, Vec3{0, 0, 0}, cfg));
    }
    state.SetItemsProcessed(state.iterations() * cloud.size());
}
BENCHMARK(BM_SimulateScan)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SimulateScanParallel(benchmark::State& state) {
    const PointCloud& cloud = cached_disk(4);
    ScannerConfig cfg;
    cfg.zenith_max = 135.0;
    cfg.max_range = 120.0;
    const auto workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(slr::simulate_scan(cloud, Vec3{0, 0, 0}, cfg, workers));
    }
    state.SetItemsProcessed(state.iterations() * cloud.size());
}
BENCHMARK(BM_SimulateScanParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_KdTreeBuild(benchmark::State& state) {
    const PointCloud cloud = random_box(static_cast<std::size_t>(state.range(0)), 20.0, 2);
    for (auto _ : state) {
        slr::KdTree tree(cloud.points);
        benchmark::DoNotOptimize(tree.size());
    }
    state.SetItemsProcessed(state.iterations() * cloud.size());
}
BENCHMARK(BM_KdTreeBuild)->Arg(10000)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_KdTreeQuery(benchmark::State& state) {
    const PointCloud target = random_box(static_cast<std::size_t>(state.range(0)), 20.0, 3);
    const PointCloud query = random_box(10000, 22.0, 4);
    const slr::KdTree tree(target.points);
    for (auto _ : state) {
        double acc = 0.0;
        for (const auto& q : query.points) acc += tree.nearest_distance(q.pos());
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * query.size());
}
BENCHMARK(BM_KdTreeQuery)->Arg(10000)->Arg(100000)->Arg(1000000);

void BM_Similarity(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const PointCloud a = random_box(n, 20.0, 5);
    const PointCloud b = random_box(n, 20.0, 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(slr::similarity(a, b, 0.10));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Similarity)->Arg(100000)->Arg(300000)->Unit(benchmark::kMillisecond);

void BM_GenerateScene(benchmark::State& state) {
    SceneConfig cfg;
    cfg.disk_radius = 10.0;
    cfg.grid_spacing = 0.01;
    cfg.ground_z = -1.65;
    cfg.n_rectangles = static_cast<std::uint64_t>(state.range(0));
    cfg.rect_size_min = 0.1;
    cfg.rect_size_max = 2.0;
    cfg.rect_xy_min = -10.0;
    cfg.rect_xy_max = 10.0;
    cfg.rect_z_min = -1.0;
    cfg.rect_z_max = 2.0;
    cfg.seed = 9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(slr::generate_dense_scene(cfg));
    }
}
BENCHMARK(BM_GenerateScene)->Arg(0)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_GroundDensityFilter(benchmark::State& state) {
    const PointCloud& cloud = cached_disk(4);
    const auto cells = slr::build_grid(cloud, 2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(slr::filter_ground_density(cells, cloud, 5.0, 1000));
    }
}
BENCHMARK(BM_GroundDensityFilter)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
