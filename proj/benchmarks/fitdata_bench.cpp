// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include <cmath>

#include <benchmark/benchmark.h>

#include "egsr/expr/parser.hpp"
#include "egsr/fitdata/model.hpp"

namespace {

using namespace egsr;

auto dataset(Eigen::Index rows) -> fitdata::Dataset
{
    fitdata::Dataset d;
    d.predictors = (Eigen::MatrixXd::Random(rows, 5).array() + 1.5).matrix();
    d.target = 2.0 * d.predictors.col(0).array().sqrt() + 3.0 * d.predictors.col(4).array();
    for (int j = 0; j < 5; ++j) {
        d.predictor_names.push_back("x" + std::to_string(j));
    }
    return d;
}

void BM_Evaluate(benchmark::State& state)
{
    auto d = dataset(state.range(0));
    auto e = expr::parse_expression("t0 * sqrt(x0) + t1 * exp(x4 / x2) - log(x1)").expr;
    std::vector<double> theta { 2.0, 3.0 };
    for (auto _ : state) {
        benchmark::DoNotOptimize(fitdata::evaluate(e, theta, d));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evaluate)->Arg(1000)->Arg(100000);

void BM_FitParams(benchmark::State& state)
{
    auto d = dataset(1000);
    auto e = expr::parse_expression("t0 * sqrt(x0) + t1 * x4").expr;
    fitdata::FitOptions o;
    o.restarts = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fitdata::fit_params(e, d, o));
    }
}
BENCHMARK(BM_FitParams)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DescriptionLength(benchmark::State& state)
{
    auto d = dataset(1000);
    auto e = expr::parse_expression("t0 * sqrt(x0) + t1 * x4").expr;
    std::vector<double> theta { 2.0, 3.0 };
    for (auto _ : state) {
        benchmark::DoNotOptimize(fitdata::description_length(e, theta, d));
    }
}
BENCHMARK(BM_DescriptionLength)->Unit(benchmark::kMicrosecond);

} // namespace
