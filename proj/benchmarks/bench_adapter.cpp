#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "emotta/adapter.hpp"
#include "emotta/gaussian.hpp"
#include "emotta/types.hpp"

using namespace emotta;

namespace {

Vector random_unit(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
    return l2_normalized(v);
}

PrototypeSet random_prototypes(Eigen::Index d, Eigen::Index k, std::mt19937_64& rng) {
    PrototypeSet set;
    set.prototypes.resize(d, k);
    for (Eigen::Index y = 0; y < k; ++y) {
        set.prototypes.col(y) = random_unit(d, rng);
        set.class_names.push_back("class_" + std::to_string(y));
    }
    return set;
}

void bm_process_sample(benchmark::State& state) {
    const auto d = static_cast<Eigen::Index>(state.range(0));
    const auto k = static_cast<Eigen::Index>(state.range(1));
    std::mt19937_64 rng(7);
    auto protos = random_prototypes(d, k, rng);
    HyperParams hyper;
    hyper.beta = 0.5;
    AdapterState adapter_state = adapter::init(protos, hyper);

    std::vector<Embedding> pool;
    for (int i = 0; i < 256; ++i) pool.push_back(random_unit(d, rng));
    std::size_t next = 0;
    for (auto _ : state) {
        auto out = adapter::process_sample(adapter_state, pool[next], protos, hyper);
        benchmark::DoNotOptimize(out.predicted_class);
        next = (next + 1) % pool.size();
    }
    state.SetItemsProcessed(state.iterations());
}

void bm_factorize(benchmark::State& state) {
    const auto d = static_cast<Eigen::Index>(state.range(0));
    std::mt19937_64 rng(11);
    Matrix a(d, d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = normal(rng);
    }
    Matrix sigma = a * a.transpose() / static_cast<double>(d);
    sigma.diagonal().array() += 0.1;

    for (auto _ : state) {
        auto f = gaussian::factorize(sigma, 1e-4);
        benchmark::DoNotOptimize(f.log_det);
    }
}

}  // namespace

BENCHMARK(bm_process_sample)->Args({64, 4})->Args({512, 8});
BENCHMARK(bm_factorize)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
