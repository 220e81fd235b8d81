// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_BENCH_COMMON_HPP
#define EGSR_BENCH_COMMON_HPP

#include <random>
#include <vector>

#include "egsr/expr/expr.hpp"

namespace egsr::bench {

auto random_tree(std::mt19937_64& rng, std::size_t size, std::uint32_t variables) -> expr::Expr;
auto corpus(std::uint64_t seed, std::size_t n, std::size_t max_size) -> std::vector<expr::Expr>;

} // namespace egsr::bench

#endif
