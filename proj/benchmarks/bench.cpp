#include <benchmark/benchmark.h>

#include "geopitch/dsp.hpp"
#include "geopitch/edgecases.hpp"
#include "geopitch/estimators.hpp"
#include "geopitch/prevalence.hpp"
#include "geopitch/reduction.hpp"

#include <array>

using namespace geopitch;

namespace {

std::vector<double> tone_window() {
    constexpr std::array amps{1.0, 0.6, 0.4, 0.3};
    const Signal s = synthesize(harmonic_partials(*parse_note("A3"), amps), 0.2);
    return {s.samples.begin(), s.samples.begin() + 4096};
}

void BM_EnumerateBasicCases(benchmark::State& state) {
    for (auto _ : state) {
        for (Configuration c : kAllConfigurations) benchmark::DoNotOptimize(enumerate_basic_cases(c));
    }
}
BENCHMARK(BM_EnumerateBasicCases);

void BM_ReductionGraphFullPool(benchmark::State& state) {
    const auto pool = candidate_pool(Configuration::GammaGamma);
    const GeneratorSet set = make_generator_set(Configuration::GammaGamma, pool);
    for (auto _ : state) benchmark::DoNotOptimize(reduction_graph(set));
}
BENCHMARK(BM_ReductionGraphFullPool);

// One sampled interpretation plus classification and tallying.
void BM_Trial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(substream_seed(1, n));
    for (auto _ : state) {
        const auto s = sample_interpretation(n, rng);
        benchmark::DoNotOptimize(tally_trial(s));
    }
}
BENCHMARK(BM_Trial)->Arg(10)->Arg(40)->Arg(80)->Arg(120);

void BM_ConstantQFrame(benchmark::State& state) {
    const ConstantQ bank(44100.0, 4096);
    const auto w = tone_window();
    for (auto _ : state) benchmark::DoNotOptimize(bank.transform(w));
}
BENCHMARK(BM_ConstantQFrame);

void BM_ConstantQKernels(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(ConstantQ(44100.0, 4096));
}
BENCHMARK(BM_ConstantQKernels)->Unit(benchmark::kMillisecond);

void BM_NaiveMono(benchmark::State& state) {
    const Frame f = cqt_frame(tone_window(), 44100.0);
    for (auto _ : state) benchmark::DoNotOptimize(naive_mono(f));
}
BENCHMARK(BM_NaiveMono);

void BM_Hps(benchmark::State& state) {
    const Frame f = cqt_frame(tone_window(), 44100.0);
    for (auto _ : state) benchmark::DoNotOptimize(hps_estimate(f));
}
BENCHMARK(BM_Hps);

void BM_SimplePoly(benchmark::State& state) {
    Rng rng(3);
    const auto s = sample_interpretation(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(simple_poly(s.interpretation));
}
BENCHMARK(BM_SimplePoly)->Arg(5)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
