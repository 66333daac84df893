// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "foresight/llm/cache.hpp"
#include "foresight/metrics.hpp"
#include "foresight/prompts.hpp"

namespace {

using namespace foresight;

void BM_Brier(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> p(0.0, 1.0);
    std::vector<ScoredPair> pairs(static_cast<std::size_t>(state.range(0)));
    for (auto& s : pairs) s = {p(rng), static_cast<int>(rng() % 2)};
    for (auto _ : state) benchmark::DoNotOptimize(brier(pairs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Brier)->Range(8, 1 << 16);

void BM_ParseProbability(benchmark::State& state) {
    const std::string text =
        "Weighing the history of similar announcements, the 2019 precedent and the 12-month window, I would put "
        "this somewhere near 35% at first glance, but after the rationale above my final answer is 0.28.";
    for (auto _ : state) benchmark::DoNotOptimize(parse_probability(text, AnswerScale::Percent));
}
BENCHMARK(BM_ParseProbability);

void BM_RenderBasic(benchmark::State& state) {
    static const auto reg = TemplateRegistry::load(FORESIGHT_SOURCE_TEMPLATE_DIR);
    Event e;
    e.id = "bench";
    e.name = "Widget ships";
    e.condition = "Acme ships the widget to customers";
    e.description = "Acme announced the widget last spring.";
    e.created = Date::from_iso("2022-01-01");
    e.expires = Date::from_iso("2022-12-31");
    const RenderContext ctx(e, Date::from_iso("2022-08-01"));
    const auto& tpl = reg.get("forecaster/predict");
    auto bindings = ctx.bindings();
    for (const auto& [k, v] : reg.shared_bindings()) bindings.emplace(k, v);
    for (auto _ : state) benchmark::DoNotOptimize(render(tpl, bindings));
}
BENCHMARK(BM_RenderBasic);

void BM_CacheKey(benchmark::State& state) {
    llm::CompletionRequest req;
    req.prompt.assign(static_cast<std::size_t>(state.range(0)), 'x');
    for (auto _ : state) benchmark::DoNotOptimize(llm::cache_key("scripted:bench", req));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CacheKey)->Range(256, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
