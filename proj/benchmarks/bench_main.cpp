#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "chomp/cwt.hpp"
#include "chomp/filter.hpp"
#include "chomp/nn/model.hpp"
#include "chomp/sync.hpp"

namespace {

void BM_CwtWindowMic(benchmark::State& state) {
    const auto& unit = chomp::unit_spec(chomp::UnitKind::Microphones);
    const chomp::CwtPlan plan = chomp::make_plan(unit);
    std::vector<float> x(static_cast<std::size_t>(2.0 * unit.sample_rate));
    std::mt19937_64 rng(1);
    std::normal_distribution<float> g(0.0f, 1.0f);
    for (auto& v : x) v = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(chomp::cwt_window(x, plan));
}
BENCHMARK(BM_CwtWindowMic)->Unit(benchmark::kMillisecond);

void BM_CwtWindowImu(benchmark::State& state) {
    const auto& unit = chomp::unit_spec(chomp::UnitKind::Imu);
    const chomp::CwtPlan plan = chomp::make_plan(unit);
    std::vector<float> x(static_cast<std::size_t>(2.0 * unit.sample_rate));
    std::mt19937_64 rng(1);
    std::normal_distribution<float> g(0.0f, 1.0f);
    for (auto& v : x) v = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(chomp::cwt_window(x, plan));
}
BENCHMARK(BM_CwtWindowImu)->Unit(benchmark::kMillisecond);

void BM_GccPhat(benchmark::State& state) {
    chomp::AlignmentConfig cfg;
    const double fs = 8000.0;
    const auto left = chomp::generate_alignment_signal(cfg, fs, 3);
    std::vector<float> right(left.size(), 0.0f);
    for (std::size_t i = 500; i < right.size(); ++i) right[i] = left[i - 500];
    for (auto _ : state)
        benchmark::DoNotOptimize(
            chomp::gcc_phat_offset(left, right, fs, 2.0, cfg.gaussian_sigma));
}
BENCHMARK(BM_GccPhat)->Unit(benchmark::kMillisecond);

void BM_Bandpass(benchmark::State& state) {
    const auto f = chomp::design_bandpass(chomp::unit_spec(chomp::UnitKind::Microphones));
    std::vector<float> x(16000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = static_cast<float>(std::sin(0.07 * static_cast<double>(i)));
    for (auto _ : state) benchmark::DoNotOptimize(chomp::apply_bandpass(x, f));
}
BENCHMARK(BM_Bandpass)->Unit(benchmark::kMillisecond);

void BM_BackboneForward(benchmark::State& state) {
    chomp::nn::SingleSensorModel<float> model;
    model.init({}, 0);
    const int batch = static_cast<int>(state.range(0));
    chomp::nn::Act<float> x;
    x.resize(batch, 64, 125, 4);
    x.m.setRandom();
    chomp::nn::Mat<float> logits;
    chomp::Rng rng(0);
    for (auto _ : state) {
        model.forward(x, logits, false, rng);
        benchmark::DoNotOptimize(logits);
    }
}
BENCHMARK(BM_BackboneForward)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
