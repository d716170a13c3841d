#include <benchmark/benchmark.h>

#include "salbench/fixmap.hpp"
#include "salbench/imaging.hpp"
#include "salbench/metrics.hpp"
#include "salbench/rng.hpp"
#include "salbench/stats.hpp"

using namespace salbench;
using fixmap::DensityMap;
using fixmap::FixationSet;

namespace {

FixationSet random_fixations(std::size_t n, fixmap::Size size, std::uint64_t seed, std::string id = "s") {
    Rng rng(seed);
    FixationSet f{std::move(id), "o", {}, size};
    for (std::size_t i = 0; i < n; ++i) {
        f.points.push_back({rng.uniform(0, size.width - 1.0), rng.uniform(0, size.height - 1.0)});
    }
    return f;
}

void BM_Blur(benchmark::State& state, fixmap::BlurDomain domain) {
    const auto raster = fixmap::rasterize(random_fixations(200, {480, 270}, 1));
    const fixmap::BlurSpec spec{static_cast<double>(state.range(0)), domain};
    DensityMap out;
    for (auto _ : state) {
        fixmap::blur_density(raster, spec, out);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK_CAPTURE(BM_Blur, spatial, fixmap::BlurDomain::Spatial)->Arg(1)->Arg(10)->Arg(30)->Arg(100);
BENCHMARK_CAPTURE(BM_Blur, fourier, fixmap::BlurDomain::Fourier)->Arg(1)->Arg(10)->Arg(30)->Arg(100);

void BM_ScorePair(benchmark::State& state) {
    const fixmap::Size size{480, 270};
    const auto fix = random_fixations(12, size, 2);
    const auto neg = random_fixations(2000, size, 3, "t");
    const auto gt = fixmap::blur_density(fixmap::rasterize(fix), {30.0});
    const auto pred = fixmap::blur_density(fixmap::rasterize(random_fixations(12, size, 4)), {30.0});
    for (auto _ : state) benchmark::DoNotOptimize(metrics::score_pair(pred, fix, gt, neg, 7));
}
BENCHMARK(BM_ScorePair);

void BM_HcToLg(benchmark::State& state) {
    const std::size_t w = 1920, h = 1080;
    Rng rng(5);
    std::vector<double> rgb(w * h * 3);
    for (auto& v : rgb) v = rng.uniform();
    const imaging::RasterImage img(w, h, 3, imaging::Encoding::SrgbGamma, std::move(rgb));
    for (auto _ : state) benchmark::DoNotOptimize(imaging::hc_to_lg(img, imaging::ResizePolicy::fixed(120)));
}
BENCHMARK(BM_HcToLg)->Unit(benchmark::kMillisecond);

void BM_IncompleteBeta(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        x = x > 0.98 ? 0.01 : x + 0.0137;
        benchmark::DoNotOptimize(stats::incomplete_beta(4.5, 60.0, x));
    }
}
BENCHMARK(BM_IncompleteBeta);

}  // namespace
BENCHMARK_MAIN();
