#include <benchmark/benchmark.h>

#include "bellcav/bellopt.hpp"
#include "bellcav/correlators.hpp"
#include "bellcav/decoherence.hpp"
#include "bellcav/fockspace.hpp"

using namespace bellcav;

namespace {

DecoherenceParams paper_rates()
{
    DecoherenceParams p;
    p.kappa = 1.0 / (2.0 * 0.13);
    p.gamma0 = 1.0 / (2.0 * 0.036);
    p.gammac = 4.08;
    p.gammap = p.gamma0;
    p.chi = 2.0 * kPi * 49.0 * 49.0 * 1e3 / 260.0;
    return p;
}

Timeline paper_timeline()
{
    Timeline tl;
    tl.t1 = 80e-6;
    tl.t2 = 166.5e-6;
    tl.t3 = 27.1e-6;
    tl.t5 = 96.8e-6;
    tl.t6 = 20e-6;
    tl.v = 250.0;
    return timeline_for_separation(tl, 1.0);
}

void BM_CorrOnOff(benchmark::State& state)
{
    double theta = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(corr_onoff(Complex(0.664, 0.1), theta, 1.0, Complex(0.4, -0.2), 0.8));
        theta = theta < 3.0 ? theta + 1e-3 : 0.1;
    }
}
BENCHMARK(BM_CorrOnOff);

void BM_CorrParity(benchmark::State& state)
{
    double theta = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(corr_parity(Complex(0.9, 0.0), theta, 0.5, Complex(0.0, 0.15)));
        theta = theta < 3.0 ? theta + 1e-3 : 0.1;
    }
}
BENCHMARK(BM_CorrParity);

void BM_FinalCorrelation(benchmark::State& state)
{
    const DecoherenceParams p = paper_rates();
    const Timeline tl = paper_timeline();
    for (auto _ : state)
        benchmark::DoNotOptimize(final_correlation(0.0, Complex(0.0, 0.15), p, tl, 1.0));
}
BENCHMARK(BM_FinalCorrelation)->Unit(benchmark::kMicrosecond);

void BM_MaximizeBellOnOff(benchmark::State& state)
{
    FamilyParams fp;
    fp.alpha = 0.664;
    OptimizerConfig cfg;
    cfg.restarts = static_cast<int>(state.range(0));
    cfg.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(maximize_bell(Family::onoff, fp, 8, cfg).best_value);
}
BENCHMARK(BM_MaximizeBellOnOff)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LindbladStep(benchmark::State& state)
{
    const int N = static_cast<int>(state.range(0));
    const DensityMatrix rho = build_entangled_state(0.5, N, PhaseConvention::main_text);
    for (auto _ : state)
        benchmark::DoNotOptimize(lindblad_evolve(rho, 0.02, 0.01, 1.0, 0.05, 1).trace());
}
BENCHMARK(BM_LindbladStep)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
