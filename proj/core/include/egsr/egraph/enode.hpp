// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_EGRAPH_ENODE_HPP
#define EGSR_EGRAPH_ENODE_HPP

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>

#include "egsr/expr/expr.hpp"

namespace egsr::egraph {

struct EClassId {
    std::uint32_t value { 0 };

    friend constexpr auto operator<=>(EClassId, EClassId) = default;
};

// An operator applied to e-class ids. Terminals carry their variable or
// parameter index, or the bit pattern of their constant, in `payload`.
struct ENode {
    expr::Op op { expr::Op::Const };
    std::uint64_t payload { 0 };
    std::array<EClassId, 2> children {};

    static auto variable(std::uint32_t i) -> ENode { return { expr::Op::Var, i, {} }; }
    static auto parameter(std::uint32_t i) -> ENode { return { expr::Op::Param, i, {} }; }
    static auto constant(double v) -> ENode
    {
        if (v == 0.0) {
            v = 0.0; // fold -0.0
        }
        return { expr::Op::Const, std::bit_cast<std::uint64_t>(v), {} };
    }
    static auto unary(expr::Op op, EClassId c) -> ENode { return { op, 0, { c, EClassId {} } }; }
    static auto binary(expr::Op op, EClassId l, EClassId r) -> ENode { return { op, 0, { l, r } }; }

    [[nodiscard]] auto arity() const noexcept -> int { return expr::arity(op); }
    [[nodiscard]] auto is_leaf() const noexcept -> bool { return expr::is_leaf(op); }
    [[nodiscard]] auto kids() const noexcept -> std::span<EClassId const>
    {
        return { children.data(), static_cast<std::size_t>(arity()) };
    }
    [[nodiscard]] auto kids() noexcept -> std::span<EClassId>
    {
        return { children.data(), static_cast<std::size_t>(arity()) };
    }
    [[nodiscard]] auto constant_value() const noexcept -> double { return std::bit_cast<double>(payload); }
    [[nodiscard]] auto index() const noexcept -> std::uint32_t { return static_cast<std::uint32_t>(payload); }

    friend constexpr auto operator==(ENode const&, ENode const&) -> bool = default;
    friend constexpr auto operator<=>(ENode const&, ENode const&) = default;
};

// Leaf of an expression as an e-node (no children).
auto leaf_of(expr::Expr const& e) -> ENode;

} // namespace egsr::egraph

template <>
struct std::hash<egsr::egraph::EClassId> {
    auto operator()(egsr::egraph::EClassId id) const noexcept -> std::size_t { return std::hash<std::uint32_t> {}(id.value); }
};

template <>
struct std::hash<egsr::egraph::ENode> {
    auto operator()(egsr::egraph::ENode const& n) const noexcept -> std::size_t
    {
        // splitmix-style mixing of the four fields
        auto mix = [](std::uint64_t h, std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        };
        std::uint64_t h = static_cast<std::uint64_t>(n.op);
        h = mix(h, n.payload);
        h = mix(h, n.children[0].value);
        h = mix(h, n.children[1].value);
        return static_cast<std::size_t>(h);
    }
};

#endif
