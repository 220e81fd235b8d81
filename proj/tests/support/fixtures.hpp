// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_TESTS_FIXTURES_HPP
#define EGSR_TESTS_FIXTURES_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egsr/egraph/egraph.hpp"
#include "egsr/expr/expr.hpp"
#include "egsr/fitdata/dataset.hpp"

namespace egsr::oracle {

// The reference graph of the matching example: the constant 2, x, a class
// holding both 2*x and x+x, (2*x)/2, 2^2, and a root holding both
// 2*(x+x) and ((2*x)/2)*(2^2).
struct MatchingGraph {
    egraph::EGraph g;
    egraph::EClassId two, x, sum, quotient, power, root;
};
auto matching_graph() -> MatchingGraph;

// Complete binary tree of additions with 2^(level-1) distinct variable leaves.
auto balanced_sum(int level) -> expr::Expr;

auto parse(std::string_view text) -> expr::Expr;
auto pattern(std::string_view text) -> expr::Pattern;

// `rows` points with columns x0..x{vars-1} drawn uniformly from [lo, hi] and
// the target f(x).
auto synthetic(std::size_t rows, std::size_t vars, std::uint64_t seed,
    std::function<double(std::span<double const>)> const& f, double lo = 0.1, double hi = 4.0) -> fitdata::Dataset;

// Columns of a dataset as plain vectors, row major.
auto rows_of(fitdata::Dataset const& d) -> std::vector<std::vector<double>>;
auto target_of(fitdata::Dataset const& d) -> std::vector<double>;

// Fresh directory under the system temp dir, removed by nobody.
auto scratch_dir(std::string const& tag) -> std::string;

auto write_file(std::string const& path, std::string_view contents) -> void;
auto read_file(std::string const& path) -> std::string;

} // namespace egsr::oracle

#endif
