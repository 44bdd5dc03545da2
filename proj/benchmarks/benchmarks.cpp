#include <benchmark/benchmark.h>

#include <vector>

#include "surfreg/arap.hpp"
#include "surfreg/energy.hpp"
#include "surfreg/kdtree.hpp"
#include "surfreg/rigid.hpp"
#include "surfreg/synth.hpp"

namespace {

using surfreg::KdTree;
using surfreg::Mesh;
using surfreg::Projection;
using surfreg::Vec3;
using surfreg::Weights;

std::vector<Vec3> random_cloud(int n, std::uint64_t seed) {
    surfreg::Rng rng(seed);
    std::vector<Vec3> points;
    points.reserve(n);
    for (int i = 0; i < n; ++i) {
        points.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(-1.0, 1.0));
    }
    return points;
}

std::vector<Projection> project_all(const std::vector<Vec3>& points, const KdTree& tree) {
    std::vector<Projection> proj;
    proj.reserve(points.size());
    for (const Vec3& p : points) {
        proj.push_back(tree.project(p));
    }
    return proj;
}

void kdtree_build(benchmark::State& state) {
    const auto points = random_cloud(static_cast<int>(state.range(0)), 11);
    for (auto _ : state) {
        KdTree tree(points);
        benchmark::DoNotOptimize(tree);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(kdtree_build)->Arg(1000)->Arg(10000)->Arg(100000);

void kdtree_query(benchmark::State& state) {
    const auto points = random_cloud(static_cast<int>(state.range(0)), 12);
    const auto queries = random_cloud(1000, 13);
    const KdTree tree(points);
    for (auto _ : state) {
        for (const Vec3& q : queries) {
            benchmark::DoNotOptimize(tree.nearest(q));
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int>(queries.size()));
}
BENCHMARK(kdtree_query)->Arg(1000)->Arg(10000)->Arg(100000);

void energy_gradient(benchmark::State& state) {
    const Mesh sphere = surfreg::make_sphere(static_cast<int>(state.range(0)));
    const KdTree tree(sphere.vertices);
    const surfreg::AdjacencyGraph graph = surfreg::build_laplacian(sphere);

    surfreg::RegistrationState s;
    s.x = sphere.vertices;
    s.z = sphere.vertices;
    s.projections = project_all(s.x, tree);
    s.local_rotations = std::vector<Vec3>(s.x.size(), Vec3(0.01, -0.02, 0.03));
    s.motion.rotation = Vec3(0.01, 0.02, -0.01);

    Weights w;
    w.w3 = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(surfreg::eval_gradient(s, &graph, w));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int>(s.x.size()));
}
BENCHMARK(energy_gradient)->Arg(2)->Arg(3)->Arg(4);

void rigid_step(benchmark::State& state) {
    const Mesh sphere = surfreg::make_sphere(static_cast<int>(state.range(0)));
    const auto target = surfreg::transformed(
        surfreg::random_rigid(5, 0.1, 0.05), sphere.vertices);
    const KdTree tree(target);
    const surfreg::RigidConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(surfreg::step_rigid(sphere.vertices, tree, cfg));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int>(sphere.vertices.size()));
}
BENCHMARK(rigid_step)->Arg(2)->Arg(3)->Arg(4);

void arap_iteration(benchmark::State& state) {
    const Mesh grid = surfreg::make_grid(static_cast<int>(state.range(0)),
                                         static_cast<int>(state.range(0)), 1.0);
    const Mesh bent = surfreg::bend(grid, 0.05);
    const KdTree tree(bent.vertices);
    surfreg::ArapConfig cfg;
    cfg.max_iters = 1;
    cfg.stop_tol = 1e-300;
    for (auto _ : state) {
        benchmark::DoNotOptimize(surfreg::register_arap(grid, tree, cfg));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int>(grid.vertices.size()));
}
BENCHMARK(arap_iteration)->Arg(10)->Arg(20)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
