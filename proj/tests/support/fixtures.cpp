// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "fixtures.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "egsr/expr/parser.hpp"

namespace egsr::oracle {

using egraph::ENode;
using expr::Expr;
using expr::Op;

auto matching_graph() -> MatchingGraph
{
    MatchingGraph m;
    auto& g = m.g;
    m.two = g.add(ENode::constant(2.0));
    m.x = g.add(ENode::variable(0));
    auto product = g.add(ENode::binary(Op::Mul, m.two, m.x));
    auto doubled = g.add(ENode::binary(Op::Add, m.x, m.x));
    g.merge(product, doubled);
    g.rebuild();
    m.sum = g.find(product);
    m.quotient = g.add(ENode::binary(Op::Div, m.sum, m.two));
    m.power = g.add(ENode::binary(Op::Pow, m.two, m.two));
    auto outer = g.add(ENode::binary(Op::Mul, m.two, m.sum));
    auto other = g.add(ENode::binary(Op::Mul, m.quotient, m.power));
    g.merge(outer, other);
    g.rebuild();
    m.root = g.find(outer);
    return m;
}

auto balanced_sum(int level) -> Expr
{
    std::uint32_t next = 0;
    std::function<Expr(int)> build = [&](int l) -> Expr {
        if (l <= 1) {
            return Expr::var(next++);
        }
        auto lhs = build(l - 1);
        auto rhs = build(l - 1);
        return Expr::binary(Op::Add, std::move(lhs), std::move(rhs));
    };
    return build(level);
}

auto parse(std::string_view text) -> Expr { return expr::parse_expression(text).expr; }
auto pattern(std::string_view text) -> expr::Pattern { return expr::parse_pattern(text); }

auto synthetic(std::size_t rows, std::size_t vars, std::uint64_t seed,
    std::function<double(std::span<double const>)> const& f, double lo, double hi) -> fitdata::Dataset
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    fitdata::Dataset d;
    d.predictors.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(vars));
    d.target.resize(static_cast<Eigen::Index>(rows));
    std::vector<double> x(vars);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < vars; ++j) {
            x[j] = u(rng);
            d.predictors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[j];
        }
        d.target(static_cast<Eigen::Index>(i)) = f(x);
    }
    for (std::size_t j = 0; j < vars; ++j) {
        d.predictor_names.push_back("x" + std::to_string(j));
    }
    d.target_name = "y";
    return d;
}

auto rows_of(fitdata::Dataset const& d) -> std::vector<std::vector<double>>
{
    std::vector<std::vector<double>> out(static_cast<std::size_t>(d.rows()));
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.columns(); ++j) {
            out[static_cast<std::size_t>(i)].push_back(d.predictors(i, j));
        }
    }
    return out;
}

auto target_of(fitdata::Dataset const& d) -> std::vector<double>
{
    return { d.target.data(), d.target.data() + d.target.size() };
}

auto scratch_dir(std::string const& tag) -> std::string
{
    static std::atomic<int> counter { 0 };
    auto dir = std::filesystem::temp_directory_path()
        / ("egsr-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir.string();
}

void write_file(std::string const& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << contents;
}

auto read_file(std::string const& path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace egsr::oracle
