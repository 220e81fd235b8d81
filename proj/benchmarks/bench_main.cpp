// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "common.hpp"

#include <array>

namespace egsr::bench {

using expr::Expr;
using expr::Op;

auto random_tree(std::mt19937_64& rng, std::size_t size, std::uint32_t variables) -> Expr
{
    static constexpr std::array unary { Op::Sin, Op::Cos, Op::Exp, Op::Log, Op::Sqrt, Op::Abs };
    static constexpr std::array binary { Op::Add, Op::Sub, Op::Mul, Op::Div, Op::PowAbs };
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    if (size <= 1) {
        switch (pick(3)) {
        case 0: return Expr::param(static_cast<std::uint32_t>(pick(2)));
        case 1: return Expr::constant(2.0);
        default: return Expr::var(static_cast<std::uint32_t>(pick(variables)));
        }
    }
    if (size == 2 || pick(4) == 0) {
        return Expr::unary(unary[pick(unary.size())], random_tree(rng, size - 1, variables));
    }
    auto left = 1 + pick(size - 2);
    return Expr::binary(binary[pick(binary.size())], random_tree(rng, left, variables), random_tree(rng, size - 1 - left, variables));
}

auto corpus(std::uint64_t seed, std::size_t n, std::size_t max_size) -> std::vector<Expr>
{
    std::mt19937_64 rng(seed);
    std::vector<Expr> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(random_tree(rng, 1 + std::uniform_int_distribution<std::size_t>(0, max_size - 1)(rng), 5));
    }
    return out;
}

} // namespace egsr::bench

#include <benchmark/benchmark.h>

// the packaged benchmark_main archive is LTO-only, so the entry point lives here
BENCHMARK_MAIN();
