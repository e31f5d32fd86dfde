#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "geocorpus/lid.hpp"
#include "geocorpus/text_ingest.hpp"
#include "geocorpus/util.hpp"

namespace {

using namespace geocorpus;

// Two synthetic languages with disjoint alphabets, 50-char samples.
std::vector<std::pair<std::string, lid::LanguageLabel>> make_samples(
    std::size_t n, std::uint64_t seed) {
    const std::string alpha_a = "abcdefghij";
    const std::string alpha_b = "klmnopqrst";
    Rng rng(seed);
    std::vector<std::pair<std::string, lid::LanguageLabel>> samples;
    for (std::size_t i = 0; i < n; ++i) {
        const bool a = i % 2 == 0;
        const std::string& alpha = a ? alpha_a : alpha_b;
        std::string text;
        for (int k = 0; k < 50; ++k) {
            text.push_back(alpha[static_cast<std::size_t>(rng.next_below(alpha.size()))]);
        }
        samples.emplace_back(std::move(text), lid::LanguageLabel{a ? "lga" : "lgb"});
    }
    return samples;
}

lid::ModelConfig bench_config() {
    lid::ModelConfig cfg;
    cfg.epochs = 2;
    return cfg;
}

void BM_Featurize(benchmark::State& state) {
    auto cfg = bench_config();
    auto samples = make_samples(256, 1);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lid::featurize(samples[i % samples.size()].first, cfg));
        ++i;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_Featurize);

void BM_Predict(benchmark::State& state) {
    auto cfg = bench_config();
    auto model = lid::train(make_samples(512, 2), cfg);
    auto samples = make_samples(256, 3);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.predict(samples[i % samples.size()].first));
        ++i;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_Predict);

void BM_CountWords(benchmark::State& state) {
    auto samples = make_samples(256, 4);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ingest::count_words(samples[i % samples.size()].first));
        ++i;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_CountWords);

}  // namespace

BENCHMARK_MAIN();
