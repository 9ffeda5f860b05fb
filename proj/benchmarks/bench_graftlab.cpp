#include <benchmark/benchmark.h>

#include "graftlab/greens.hpp"
#include "graftlab/variation.hpp"

using namespace graftlab;

namespace {

const surface::SurfaceModel& genus2() {
    static const auto S = surface::genus2_from_fn({2.0, 2.0, 2.0}, {0.0, 0.0, 0.0});
    return S;
}

void BM_PointKernel(benchmark::State& state) {
    double r = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(greens::point_kernel_h2(r));
        r = r < 10.0 ? r + 0.01 : 0.1;
    }
}
BENCHMARK(BM_PointKernel);

void BM_Genus2Construction(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(surface::genus2_from_fn({1.6, 2.2, 2.8}, {0.3, -0.4, 0.6}));
}
BENCHMARK(BM_Genus2Construction)->Unit(benchmark::kMillisecond);

void BM_AxisTranslates(benchmark::State& state) {
    const auto& S = genus2();
    auto g = S.gluing_curve(0);
    hyp2::HPoint x{0.1, 1.3};
    const double R = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(surface::enumerate_axis_translates(S, g, x, R));
}
BENCHMARK(BM_AxisTranslates)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_GeodesicKernel(benchmark::State& state) {
    const auto& S = genus2();
    auto g = S.gluing_curve(0);
    greens::GeodesicKernelField K(S, g, {static_cast<double>(state.range(0)), 1e-8, 14.0});
    auto x = hyp2::from_fermi(g.axis, {0.4, 0.7});
    for (auto _ : state) benchmark::DoNotOptimize(K(x));
}
BENCHMARK(BM_GeodesicKernel)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_GraftingDerivative(benchmark::State& state) {
    const auto& S = genus2();
    auto g = S.gluing_curve(0), gp = S.geodesic("b1");
    for (auto _ : state) benchmark::DoNotOptimize(variation::grafting_length_derivative(S, g, gp, {10.0, 1e-8, 14.0}));
}
BENCHMARK(BM_GraftingDerivative)->Unit(benchmark::kMillisecond);

void BM_EarthquakeDerivative(benchmark::State& state) {
    const auto& S = genus2();
    auto g = S.gluing_curve(0), gp = S.geodesic("a1b1b2");
    for (auto _ : state) benchmark::DoNotOptimize(variation::earthquake_length_derivative(S, g, gp));
}
BENCHMARK(BM_EarthquakeDerivative)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
