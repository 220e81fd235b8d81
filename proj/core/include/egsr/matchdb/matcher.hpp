// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_MATCHDB_MATCHER_HPP
#define EGSR_MATCHDB_MATCHER_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "egsr/egraph/egraph.hpp"
#include "egsr/expr/expr.hpp"

namespace egsr::matchdb {

// Bindings of one match. `positions` follows the pattern's pre-order: entry i
// is the e-class bound to the i-th pattern node, operator or variable alike.
struct Substitution {
    std::vector<egraph::EClassId> positions;
    std::map<std::uint32_t, egraph::EClassId> vars;

    [[nodiscard]] auto var(std::uint32_t index) const -> std::optional<egraph::EClassId>;

    friend auto operator==(Substitution const&, Substitution const&) -> bool = default;
    friend auto operator<=>(Substitution const& a, Substitution const& b) { return a.positions <=> b.positions; }
};

struct Match {
    egraph::EClassId root;
    Substitution subst;

    friend auto operator==(Match const&, Match const&) -> bool = default;
};

// All (root, substitution) pairs under which `pattern` derives from a
// canonical e-class. Commutative operators match in either child order.
// The e-graph must be rebuilt. With a `limit`, the search gives up once it
// has more than `limit` matches and returns that partial set.
auto match_pattern(egraph::EGraph const& g, expr::Pattern const& pattern,
    std::size_t limit = std::numeric_limits<std::size_t>::max()) -> std::vector<Match>;

// Distinct match roots, ascending.
auto match_roots(egraph::EGraph const& g, expr::Pattern const& pattern) -> std::vector<egraph::EClassId>;

// Upward transitive closure over parent links, including `ids`; ascending.
auto closure_of_matches(egraph::EGraph const& g, std::span<egraph::EClassId const> ids) -> std::vector<egraph::EClassId>;

// Inserts the pattern with its variables replaced by their bindings.
auto instantiate(egraph::EGraph& g, expr::Pattern const& pattern, Substitution const& subst) -> egraph::EClassId;

} // namespace egsr::matchdb

#endif
