// Serial reference vs OpenMP for each hot loop. Parallel speedup needs
// OMP_NUM_THREADS > 1; on one core the pairs should run neck and neck.

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>

#include "cstar/engine.hpp"
#include "cstar/kernels.hpp"
#include "cstar/scenario.hpp"

using namespace cstar;

namespace {

const Environment& world() {
    static const Environment env = rasterize(load_scenario(std::string(CSTAR_FIXTURE_DIR) + "/f10_dense_islands.json"));
    return env;
}

std::vector<double> angles() {
    std::vector<double> a(1440);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = 2.0 * std::acos(-1.0) * k / a.size();
    return a;
}

// Map after a handful of scans, so ball tests see a mix of labels.
const KnownMap& partial_map() {
    static const KnownMap map = [] {
        KnownMap m(world().geometry());
        for (Point p : {Point{5.5, 5.5}, Point{20.5, 10.5}, Point{30.5, 30.5}}) {
            if (world().is_free(p)) integrate_scan(m, sense(world(), {p.x, p.y, 0.0}, SensorConfig{}));
        }
        return m;
    }();
    return map;
}

std::vector<Point> lattice_points() {
    std::vector<Point> pts;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) pts.push_back({i + 0.5, j + 0.5});
    }
    return pts;
}

template <bool Parallel>
void BM_CastRays(benchmark::State& st) {
    const auto a = angles();
    std::vector<RayReading> out;
    for (auto _ : st) {
        if (Parallel) {
            kernels::cast_rays_omp(world(), {25.5, 25.5}, a, 15.0, out);
        } else {
            kernels::cast_rays_serial(world(), {25.5, 25.5}, a, 15.0, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_IntegrateRays(benchmark::State& st) {
    const SensorScan scan = sense(world(), {25.5, 25.5, 0.0}, SensorConfig{});
    std::vector<std::uint8_t> cells(world().geometry().size());
    for (auto _ : st) {
        std::fill(cells.begin(), cells.end(), static_cast<std::uint8_t>(Cell::Unknown));
        auto changed = Parallel ? kernels::integrate_rays_omp(world().geometry(), cells.data(), scan)
                                : kernels::integrate_rays_serial(world().geometry(), cells.data(), scan);
        benchmark::DoNotOptimize(changed.data());
    }
}

template <bool Parallel>
void BM_BallTest(benchmark::State& st) {
    const auto pts = lattice_points();
    std::vector<std::uint8_t> out;
    kernels::BallQuery q;
    for (auto _ : st) {
        if (Parallel) {
            kernels::ball_test_omp(partial_map(), pts, q, out);
        } else {
            kernels::ball_test_serial(partial_map(), pts, q, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_CoverageEval(benchmark::State& st) {
    std::vector<std::uint8_t> covered(world().geometry().size(), 0);
    for (std::size_t k = 0; k < covered.size(); k += 3) covered[k] = 1;
    for (auto _ : st) {
        auto cc = Parallel ? kernels::evaluate_coverage_omp(world(), covered, 1.0)
                           : kernels::evaluate_coverage_serial(world(), covered, 1.0);
        benchmark::DoNotOptimize(cc.any_covered.data());
    }
}

template <bool Parallel>
void BM_MonteCarlo(benchmark::State& st) {
    const Environment env = rasterize(load_scenario(std::string(CSTAR_FIXTURE_DIR) + "/empty10.json"));
    MonteCarloConfig mc;
    mc.sigma_loc = {0.0, 0.05};
    mc.runs = 2;
    for (auto _ : st) {
        auto rows = Parallel ? run_monte_carlo(env, {0.5, 0.5}, {}, mc) : run_monte_carlo_serial(env, {0.5, 0.5}, {}, mc);
        benchmark::DoNotOptimize(rows.data());
    }
}

}  // namespace

BENCHMARK(BM_CastRays<false>)->Name("cast_rays/serial");
BENCHMARK(BM_CastRays<true>)->Name("cast_rays/omp");
BENCHMARK(BM_IntegrateRays<false>)->Name("integrate_rays/serial");
BENCHMARK(BM_IntegrateRays<true>)->Name("integrate_rays/omp");
BENCHMARK(BM_BallTest<false>)->Name("ball_test/serial");
BENCHMARK(BM_BallTest<true>)->Name("ball_test/omp");
BENCHMARK(BM_CoverageEval<false>)->Name("coverage_eval/serial");
BENCHMARK(BM_CoverageEval<true>)->Name("coverage_eval/omp");
BENCHMARK(BM_MonteCarlo<false>)->Name("monte_carlo/serial")->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_MonteCarlo<true>)->Name("monte_carlo/omp")->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
