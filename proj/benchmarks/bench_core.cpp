// Microbenchmarks for the hot paths: dependency-table construction, the
// contrastive loss over a full batch, positive selection and the eval-mode
// forward pass. Run the binary directly; it is not part of the test suite.

#include <benchmark/benchmark.h>

#include "n2n/mlp.hpp"
#include "n2n/objectives.hpp"
#include "n2n/rng.hpp"
#include "n2n/sbm.hpp"
#include "n2n/taps.hpp"

using namespace n2n;

namespace {

Dataset sbm_instance(std::size_t n) {
    SbmConfig cfg;
    cfg.n_nodes = n;
    return generate_sbm(cfg);
}

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (auto& v : m.data) v = rng.normal();
    return m;
}

void BM_BuildDependencyTable(benchmark::State& state) {
    const Dataset d = sbm_instance(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_dependency_table(d.graph));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(2 * d.graph.num_undirected_edges()));
}
BENCHMARK(BM_BuildDependencyTable)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SelectPositives(benchmark::State& state) {
    const Dataset d = sbm_instance(1000);
    const DependencyTable t = build_dependency_table(d.graph);
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_positives(t, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_SelectPositives)->Arg(1)->Arg(5);

void BM_InfoNceFullBatch(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const Representations h = Representations::from(random_matrix(n, 64, 1));
    const Representations s = Representations::from(random_matrix(n, 64, 2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(infonce_loss_grad(h, s, 5.0));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_InfoNceFullBatch)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EvalForward(benchmark::State& state) {
    const Dataset d = sbm_instance(1000);
    const MlpParams p = init_params(d.features.cols, 512, d.num_classes,
                                    Arch::TwoHiddenPlusHead, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(p, d.features, 0.0, ForwardMode::Eval));
    }
}
BENCHMARK(BM_EvalForward)->Unit(benchmark::kMillisecond);

void BM_AggregatePositives(benchmark::State& state) {
    const Dataset d = sbm_instance(1000);
    const DependencyTable t = build_dependency_table(d.graph);
    const PositiveAssignment top1 = select_positives(t, 1);
    const PositiveAssignment all = all_neighbour_positives(d.graph);
    const Matrix h = random_matrix(1000, 64, 3);
    const PositiveAssignment& a = state.range(0) == 1 ? top1 : all;
    for (auto _ : state) {
        benchmark::DoNotOptimize(aggregate_positives(h, a));
    }
}
BENCHMARK(BM_AggregatePositives)->Arg(1)->Arg(0);

}  // namespace

BENCHMARK_MAIN();
