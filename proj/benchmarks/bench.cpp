// Micro-benchmarks for the hot paths: demand-curve evaluation, the model
// step, normal generation, Monte Carlo pricing, and the kernel regression.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "provol/calibration.hpp"
#include "provol/demand.hpp"
#include "provol/market.hpp"
#include "provol/pricing.hpp"
#include "provol/rng.hpp"

using namespace provol;

namespace {

// Deterministic probe points spread over the table domain.
std::vector<double> probe_points(std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = -0.18 + 0.36 * static_cast<double>(i) / static_cast<double>(n - 1);
    return xs;
}

void BM_demand_eval_d1(benchmark::State& state) {
    const auto& curve = demand::equity_preset();
    const auto xs = probe_points(256);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(curve.eval_d1(xs[i]));
        i = (i + 1) & 255;
    }
}
BENCHMARK(BM_demand_eval_d1);

void BM_demand_eval_d2_slope(benchmark::State& state) {
    const auto& curve = demand::equity_preset();
    const auto xs = probe_points(256);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(curve.eval_d2_slope(xs[i]));
        i = (i + 1) & 255;
    }
}
BENCHMARK(BM_demand_eval_d2_slope);

void BM_demand_eval_d2(benchmark::State& state) {
    const auto& curve = demand::equity_preset();
    const auto xs = probe_points(256);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(curve.eval_d2(xs[i]));
        i = (i + 1) & 255;
    }
}
BENCHMARK(BM_demand_eval_d2);

void BM_derived_step(benchmark::State& state) {
    const auto model =
        market::ArchModel::derived(demand::equity_preset(), market::MarketParams(40.0, -27.0));
    double y = 0.01;
    for (auto _ : state) {
        y = market::step(model, y, 0.1);
        benchmark::DoNotOptimize(y);
        if (y > 0.15 || y < -0.15) y = 0.01;
    }
}
BENCHMARK(BM_derived_step);

void BM_normal_draw(benchmark::State& state) {
    rng::NormalStream draws(42, 0);
    for (auto _ : state) benchmark::DoNotOptimize(draws.next());
}
BENCHMARK(BM_normal_draw);

void BM_mc_euro_call(benchmark::State& state) {
    const auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const pricing::OptionSpec spec{1459.37, 1.0 / 12.0, 0.03, 1462.42, 1459.37};
    pricing::McConfig config;
    config.paths = static_cast<std::uint64_t>(state.range(0));
    config.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pricing::mc_euro_call(f_tilde, g_tilde, spec, config));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 21);
}
BENCHMARK(BM_mc_euro_call)->Arg(1024)->Arg(8192);

void BM_local_fit(benchmark::State& state) {
    const auto model =
        market::ArchModel::derived(demand::equity_preset(), market::MarketParams(40.0, -27.0));
    const auto ys = market::simulate_yields(model, 0.0, static_cast<std::size_t>(state.range(0)), 3);
    const double h = calibration::bandwidth(ys, 3.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(calibration::local_fit(ys, 0.0, h));
    }
}
BENCHMARK(BM_local_fit)->Arg(2000)->Arg(20000);

void BM_fit_poly(benchmark::State& state) {
    const auto xs = probe_points(512);
    std::vector<double> vals(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        vals[i] = 0.3 + xs[i] * (1.2 + xs[i] * (-4.0 + xs[i] * 2.5));
    for (auto _ : state) {
        benchmark::DoNotOptimize(calibration::fit_poly(xs, vals, 4));
    }
}
BENCHMARK(BM_fit_poly);

} // namespace

BENCHMARK_MAIN();
