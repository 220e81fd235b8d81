// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_EXPR_EXPR_HPP
#define EGSR_EXPR_EXPR_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace egsr::expr {

enum class Op : std::uint8_t {
    // terminals
    Var,
    Param,
    Const,
    PatVar,
    // binary
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    PowAbs,
    // unary
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
};

inline constexpr int kOpCount = static_cast<int>(Op::Abs) + 1;

constexpr auto arity(Op op) noexcept -> int
{
    switch (op) {
    case Op::Var:
    case Op::Param:
    case Op::Const:
    case Op::PatVar:
        return 0;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow:
    case Op::PowAbs:
        return 2;
    default:
        return 1;
    }
}

constexpr auto is_leaf(Op op) noexcept -> bool { return arity(op) == 0; }
constexpr auto is_unary(Op op) noexcept -> bool { return arity(op) == 1; }
constexpr auto is_binary(Op op) noexcept -> bool { return arity(op) == 2; }
constexpr auto is_commutative(Op op) noexcept -> bool { return op == Op::Add || op == Op::Mul; }

// Node weight of the default cost function: 1 per terminal, 2 per binary and
// 3 per unary operator.
constexpr auto node_cost(Op op) noexcept -> std::int64_t
{
    switch (arity(op)) {
    case 0: return 1;
    case 2: return 2;
    default: return 3;
    }
}

// Printed operator symbol ("+", "^", "|**|") or function name ("sin").
auto symbol(Op op) -> std::string_view;

// Number of operator symbols in the alphabet (binary + unary).
inline constexpr int kOperatorAlphabetSize = 12;

// An expression or pattern tree. Terminals carry either an index (variable,
// parameter, pattern variable) or a literal value (constant).
struct Expr {
    Op op { Op::Const };
    std::uint32_t index { 0 };
    double value { 0.0 };
    std::vector<Expr> children;

    static auto var(std::uint32_t i) -> Expr { return { Op::Var, i, 0.0, {} }; }
    static auto param(std::uint32_t i) -> Expr { return { Op::Param, i, 0.0, {} }; }
    static auto pattern_var(std::uint32_t i) -> Expr { return { Op::PatVar, i, 0.0, {} }; }
    static auto constant(double v) -> Expr { return { Op::Const, 0, v, {} }; }
    static auto unary(Op op, Expr child) -> Expr;
    static auto binary(Op op, Expr lhs, Expr rhs) -> Expr;

    [[nodiscard]] auto is_leaf() const noexcept -> bool { return expr::is_leaf(op); }

    friend auto operator==(Expr const&, Expr const&) -> bool = default;
};

// A pattern shares the expression representation; PatVar leaves may occur.
using Pattern = Expr;

auto size_of(Expr const& e) noexcept -> std::size_t;
auto cost_of(Expr const& e) noexcept -> std::int64_t;
auto height_of(Expr const& e) noexcept -> std::size_t;

// Distinct parameter indices occurring in `e`.
auto parameter_count(Expr const& e) -> std::size_t;
// One past the largest parameter index, 0 when the tree has no parameter.
auto parameter_span(Expr const& e) -> std::size_t;
auto has_pattern_vars(Expr const& e) noexcept -> bool;
auto max_variable_index(Expr const& e) noexcept -> int;

// Give every parameter occurrence its own index, numbered in left-to-right
// encounter order. Returns the mapping new index -> old index.
auto renumber_parameters(Expr& e) -> std::vector<std::uint32_t>;

// Fully parenthesized infix form. When `params` is non-empty, parameter
// leaves are replaced by their values.
auto render(Expr const& e, std::span<double const> params = {}) -> std::string;

// Shortest decimal form that parses back to the same double.
auto format_number(double v) -> std::string;

// Pre-order visit of every subtree.
template <typename F>
void for_each_subtree(Expr const& e, F&& f)
{
    f(e);
    for (auto const& c : e.children) {
        for_each_subtree(c, f);
    }
}

} // namespace egsr::expr

#endif
