// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_EQSAT_SATURATION_HPP
#define EGSR_EQSAT_SATURATION_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "egsr/egraph/egraph.hpp"
#include "egsr/expr/expr.hpp"

namespace egsr::eqsat {

struct RewriteRule {
    std::string name;
    expr::Pattern lhs;
    expr::Pattern rhs;

    // Parses "lhs => rhs"; throws expr::ParseError or std::invalid_argument.
    static auto parse(std::string_view line, std::string name = {}) -> RewriteRule;
};

// One rule per non-blank line, `#` starts a comment.
auto parse_rules(std::string_view text) -> std::vector<RewriteRule>;
auto load_rules(std::string const& path) -> std::vector<RewriteRule>;
auto default_rules() -> std::vector<RewriteRule> const&;
auto default_rules_text() -> std::string_view;

struct Budget {
    std::size_t max_iterations { 30 };
    std::size_t max_nodes { 10'000 };
    // A rule matching more than match_limit << k times (k = times banned so
    // far) is skipped for ban_length << k iterations.
    std::size_t match_limit { 1'000 };
    std::size_t ban_length { 5 };
};

struct SaturationReport {
    std::size_t iterations { 0 };
    std::size_t merges { 0 };
    bool saturated { false };

    friend auto operator==(SaturationReport const&, SaturationReport const&) -> bool = default;
};

// Match every rule, instantiate every right-hand side, merge, rebuild; repeat
// until nothing merges or the budget runs out. Saturated means an iteration
// with no merge and no banned rule.
auto run_saturation(egraph::EGraph& g, std::vector<RewriteRule> const& rules, Budget budget = {}) -> SaturationReport;

// Saturates `g` and extracts the cheapest expression of `id`.
auto simplify(egraph::EGraph& g, egraph::EClassId id, std::vector<RewriteRule> const& rules, Budget budget = {}) -> expr::Expr;

// Same, on a scratch e-graph seeded with `e` alone.
auto simplify(expr::Expr const& e, std::vector<RewriteRule> const& rules, Budget budget = {}) -> expr::Expr;

} // namespace egsr::eqsat

#endif
