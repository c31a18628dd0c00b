#include "mcnet/io.hpp"
#include "mcnet/solver.hpp"

#include <benchmark/benchmark.h>

namespace {

const mcnet::io::Document& reference() {
    static const mcnet::io::Document doc = mcnet::io::parse_document(mcnet::io::fixture_text("fig4_known_eff"));
    return doc;
}

void BM_Assemble(benchmark::State& state) {
    const auto& doc = reference();
    for (auto _ : state) benchmark::DoNotOptimize(mcnet::assemble_system(doc.network, doc.bcs));
}
BENCHMARK(BM_Assemble);

void BM_Jacobian(benchmark::State& state) {
    const auto& doc = reference();
    const auto sys = mcnet::assemble_system(doc.network, doc.bcs);
    const auto x = sys.reduce(mcnet::default_initial_guess(doc.network, doc.bcs).values);
    for (auto _ : state) benchmark::DoNotOptimize(sys.jacobian(x));
}
BENCHMARK(BM_Jacobian);

void BM_Solve(benchmark::State& state) {
    const auto& doc = reference();
    for (auto _ : state) benchmark::DoNotOptimize(mcnet::solve_network(doc.network, doc.bcs, doc.solver));
}
BENCHMARK(BM_Solve);

void BM_ParseAndSolve(benchmark::State& state) {
    const auto text = mcnet::io::fixture_text("fig4_free_eff");
    for (auto _ : state) {
        const auto doc = mcnet::io::parse_document(text);
        benchmark::DoNotOptimize(mcnet::solve_network(doc.network, doc.bcs, doc.solver));
    }
}
BENCHMARK(BM_ParseAndSolve);

}  // namespace

BENCHMARK_MAIN();
