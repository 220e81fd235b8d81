// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/expr/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace egsr::expr {

auto symbol(Op op) -> std::string_view
{
    switch (op) {
    case Op::Var: return "x";
    case Op::Param: return "t";
    case Op::Const: return "c";
    case Op::PatVar: return "v";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Pow: return "^";
    case Op::PowAbs: return "|**|";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    }
    return "?";
}

auto Expr::unary(Op op, Expr child) -> Expr
{
    if (!is_unary(op)) {
        throw std::invalid_argument(fmt::format("'{}' is not a unary operator", symbol(op)));
    }
    Expr e { op, 0, 0.0, {} };
    e.children.push_back(std::move(child));
    return e;
}

auto Expr::binary(Op op, Expr lhs, Expr rhs) -> Expr
{
    if (!is_binary(op)) {
        throw std::invalid_argument(fmt::format("'{}' is not a binary operator", symbol(op)));
    }
    Expr e { op, 0, 0.0, {} };
    e.children.reserve(2);
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
}

auto size_of(Expr const& e) noexcept -> std::size_t
{
    std::size_t n = 1;
    for (auto const& c : e.children) {
        n += size_of(c);
    }
    return n;
}

auto cost_of(Expr const& e) noexcept -> std::int64_t
{
    auto c = node_cost(e.op);
    for (auto const& ch : e.children) {
        c += cost_of(ch);
    }
    return c;
}

auto height_of(Expr const& e) noexcept -> std::size_t
{
    std::size_t h = 0;
    for (auto const& c : e.children) {
        h = std::max(h, height_of(c));
    }
    return h + 1;
}

auto parameter_count(Expr const& e) -> std::size_t
{
    std::set<std::uint32_t> seen;
    for_each_subtree(e, [&](Expr const& n) {
        if (n.op == Op::Param) {
            seen.insert(n.index);
        }
    });
    return seen.size();
}

auto parameter_span(Expr const& e) -> std::size_t
{
    std::size_t span = 0;
    for_each_subtree(e, [&](Expr const& n) {
        if (n.op == Op::Param) {
            span = std::max<std::size_t>(span, n.index + 1);
        }
    });
    return span;
}

auto has_pattern_vars(Expr const& e) noexcept -> bool
{
    if (e.op == Op::PatVar) {
        return true;
    }
    return std::any_of(e.children.begin(), e.children.end(), [](auto const& c) { return has_pattern_vars(c); });
}

auto max_variable_index(Expr const& e) noexcept -> int
{
    int m = e.op == Op::Var ? static_cast<int>(e.index) : -1;
    for (auto const& c : e.children) {
        m = std::max(m, max_variable_index(c));
    }
    return m;
}

namespace {
    void renumber(Expr& e, std::vector<std::uint32_t>& mapping)
    {
        if (e.op == Op::Param) {
            mapping.push_back(e.index);
            e.index = static_cast<std::uint32_t>(mapping.size() - 1);
        }
        for (auto& c : e.children) {
            renumber(c, mapping);
        }
    }

    // Negative numbers are parenthesized so that "(-1) ^ x0" reads back as a
    // constant base rather than a negated power.
    void write_number(double v, std::string& out)
    {
        if (std::signbit(v) && v != 0.0) {
            out += '(';
            out += format_number(v);
            out += ')';
        } else {
            out += format_number(v);
        }
    }

    void render_into(Expr const& e, std::span<double const> params, std::string& out)
    {
        switch (e.op) {
        case Op::Var:
            fmt::format_to(std::back_inserter(out), "x{}", e.index);
            return;
        case Op::PatVar:
            fmt::format_to(std::back_inserter(out), "v{}", e.index);
            return;
        case Op::Param:
            if (e.index < params.size()) {
                write_number(params[e.index], out);
            } else {
                fmt::format_to(std::back_inserter(out), "t{}", e.index);
            }
            return;
        case Op::Const:
            write_number(e.value, out);
            return;
        default:
            break;
        }
        if (is_unary(e.op)) {
            out += symbol(e.op);
            out += '(';
            render_into(e.children[0], params, out);
            out += ')';
            return;
        }
        out += '(';
        render_into(e.children[0], params, out);
        out += ' ';
        out += symbol(e.op);
        out += ' ';
        render_into(e.children[1], params, out);
        out += ')';
    }
} // namespace

auto renumber_parameters(Expr& e) -> std::vector<std::uint32_t>
{
    std::vector<std::uint32_t> mapping;
    renumber(e, mapping);
    return mapping;
}

auto format_number(double v) -> std::string
{
    std::array<char, 64> buf {};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc {}) {
        return fmt::format("{}", v);
    }
    return { buf.data(), ptr };
}

auto render(Expr const& e, std::span<double const> params) -> std::string
{
    std::string out;
    render_into(e, params, out);
    return out;
}

} // namespace egsr::expr
