#include <benchmark/benchmark.h>

#include <random>

#include "cpstap/cpstap.hpp"

using namespace cpstap;

namespace {

const VirtualMaps& default_maps() {
    static const VirtualMaps vm = build_virtual_maps(coprime_positions(2, 3), 18);
    return vm;
}

}  // namespace

static void BM_BuildVirtualMaps(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(build_virtual_maps(coprime_positions(2, 3), 18));
}
BENCHMARK(BM_BuildVirtualMaps)->Unit(benchmark::kMillisecond);

static void BM_BuildRdMaps(benchmark::State& st) {
    const auto& vm = default_maps();
    const RMatrix w = pinv_weight(vm.f);
    const int m = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(build_rd_maps(vm, 0.1667, m, w));
}
BENCHMARK(BM_BuildRdMaps)->Arg(1)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_Dictionary(benchmark::State& st) {
    RadarScenario s;
    const auto& vm = default_maps();
    const auto rd = build_rd_maps(vm, 0.1667, 3);
    PriorKnowledge p;
    for (auto _ : st) benchmark::DoNotOptimize(build_dictionary(s, p, vm, rd));
}
BENCHMARK(BM_Dictionary)->Unit(benchmark::kMillisecond);

static void BM_Omp(benchmark::State& st) {
    RadarScenario s;
    const auto& vm = default_maps();
    const auto rd = build_rd_maps(vm, 0.1667, 3);
    const auto dict = build_dictionary(s, PriorKnowledge{}, vm, rd);
    const CVector z = rd_virtual_snapshot_blocks(true_covariance(s), vm, rd.centers);
    const int k = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(omp_subspace(z, dict.atoms, k));
}
BENCHMARK(BM_Omp)->Arg(10)->Arg(30)->Unit(benchmark::kMicrosecond);

static void BM_ErrorTrace(benchmark::State& st) {
    RadarScenario s;
    s.m_pulses = 8;
    const auto vm = build_virtual_maps(s.geom, s.m_pulses);
    const auto centers = doppler_bin_centers(0.1667, 3, s.m_pulses);
    const CMatrix r = true_covariance(s);
    for (auto _ : st) benchmark::DoNotOptimize(error_trace_structured(r, vm, centers, 10));
}
BENCHMARK(BM_ErrorTrace)->Unit(benchmark::kMicrosecond);

static void BM_PipelineTrial(benchmark::State& st) {
    RadarScenario s;
    SinrWorkspace ws(s);
    ws.point(s.target.doppler, 3);
    PriorKnowledge p;
    std::uint64_t seed = 1;
    for (auto _ : st) {
        const CMatrix rh = sample_covariance(ws.source().draw(5, seed++));
        benchmark::DoNotOptimize(ws.proposed(s.target.doppler, 3, p, rh, PipelineOptions{}));
    }
}
BENCHMARK(BM_PipelineTrial)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
