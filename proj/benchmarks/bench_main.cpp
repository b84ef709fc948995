#include <benchmark/benchmark.h>

#include "nsaf/nsaf.hpp"

namespace {

nsaf::SubbandFrame warm_frame(nsaf::SubbandDecomposer& dec, const nsaf::SignalBuffer& u) {
    nsaf::SubbandFrame frame;
    for (double x : u.samples) dec.push_samples(x, x, frame);
    return frame;
}

}  // namespace

static void BM_DecomposerPush(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    nsaf::SubbandDecomposer dec(nsaf::make_default_bank(n), 512);
    const auto u = nsaf::gen_wgn(1.0, 4096, {7});
    nsaf::SubbandFrame frame;
    std::size_t i = 0;
    for (auto _ : state) {
        const double x = u.samples[i++ & 4095];
        benchmark::DoNotOptimize(dec.push_samples(x, x, frame));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DecomposerPush)->Arg(1)->Arg(2)->Arg(8);

static void BM_NsafStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    nsaf::SubbandDecomposer dec(nsaf::make_default_bank(n), 512);
    const auto frame = warm_frame(dec, nsaf::gen_wgn(1.0, 4096, {3}));
    nsaf::Nsaf filter(512, n, {0.5, 1e-3});
    nsaf::StepReport report;
    for (auto _ : state) {
        filter.step(frame, report);
        benchmark::DoNotOptimize(report.errors.data());
    }
}
BENCHMARK(BM_NsafStep)->Arg(1)->Arg(8);

static void BM_JosrStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    nsaf::SubbandDecomposer dec(nsaf::make_default_bank(n), 512);
    const auto frame = warm_frame(dec, nsaf::gen_wgn(1.0, 4096, {3}));
    nsaf::Josr filter(512, n, 1e-3);
    nsaf::StepReport report;
    for (auto _ : state) {
        filter.step(frame, report);
        benchmark::DoNotOptimize(report.errors.data());
    }
}
BENCHMARK(BM_JosrStep)->Arg(1)->Arg(8);

static void BM_DesignPrototype(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(nsaf::design_prototype(8, 16));
}
BENCHMARK(BM_DesignPrototype);
BENCHMARK_MAIN();
