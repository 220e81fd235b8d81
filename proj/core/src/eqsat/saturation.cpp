// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/eqsat/saturation.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "egsr/expr/parser.hpp"
#include "egsr/matchdb/matcher.hpp"

namespace egsr::eqsat {

namespace {

    constexpr std::string_view kDefaultRules = R"(# commutativity (already implied by sorted children)
comm-add: v0 + v1 => v1 + v0
comm-mul: v0 * v1 => v1 * v0
# associativity
assoc-add-r: (v0 + v1) + v2 => v0 + (v1 + v2)
assoc-add-l: v0 + (v1 + v2) => (v0 + v1) + v2
assoc-mul-r: (v0 * v1) * v2 => v0 * (v1 * v2)
assoc-mul-l: v0 * (v1 * v2) => (v0 * v1) * v2
# distributivity
distribute: v0 * (v1 + v2) => (v0 * v1) + (v0 * v2)
factor: (v0 * v1) + (v0 * v2) => v0 * (v1 + v2)
# identities
add-zero: v0 + 0 => v0
sub-zero: v0 - 0 => v0
mul-one: v0 * 1 => v0
div-one: v0 / 1 => v0
mul-zero: v0 * 0 => 0
div-self: v0 / v0 => 1
sub-self: v0 - v0 => 0
double-neg: -1 * (-1 * v0) => v0
add-self: v0 + v0 => 2 * v0
div-mul: (v0 / v1) * v2 => v0 * (v2 / v1)
mul-div: (v0 * v1) / v2 => v0 * (v1 / v2)
# log and exp (log is protected: log|x|)
log-exp: log(exp(v0)) => v0
exp-log: exp(log(v0)) => abs(v0)
log-mul: log(v0 * v1) => log(v0) + log(v1)
log-div: log(v0 / v1) => log(v0) - log(v1)
exp-add: exp(v0 + v1) => exp(v0) * exp(v1)
# powers
pow-one: v0 ^ 1 => v0
pow-zero: v0 ^ 0 => 1
abs-abs: abs(abs(v0)) => abs(v0)
sqrt-square: sqrt(v0 * v0) => abs(v0)
)";

    void collect_vars(expr::Pattern const& p, std::set<std::uint32_t>& out)
    {
        expr::for_each_subtree(p, [&](expr::Expr const& n) {
            if (n.op == expr::Op::PatVar) {
                out.insert(n.index);
            }
        });
    }

    auto trim(std::string_view s) -> std::string_view
    {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string_view::npos) {
            return {};
        }
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

} // namespace

auto RewriteRule::parse(std::string_view line, std::string name) -> RewriteRule
{
    auto arrow = line.find("=>");
    if (arrow == std::string_view::npos) {
        throw std::invalid_argument(fmt::format("rule '{}' has no '=>'", line));
    }
    RewriteRule r;
    r.name = std::move(name);
    r.lhs = expr::parse_pattern(trim(line.substr(0, arrow)));
    r.rhs = expr::parse_pattern(trim(line.substr(arrow + 2)));
    std::set<std::uint32_t> lv;
    std::set<std::uint32_t> rv;
    collect_vars(r.lhs, lv);
    collect_vars(r.rhs, rv);
    for (auto v : rv) {
        if (!lv.contains(v)) {
            throw std::invalid_argument(fmt::format("rule '{}': v{} appears only on the right-hand side", line, v));
        }
    }
    if (r.lhs == r.rhs) {
        throw std::invalid_argument(fmt::format("rule '{}' rewrites a pattern to itself", line));
    }
    if (r.name.empty()) {
        r.name = std::string(trim(line));
    }
    return r;
}

auto parse_rules(std::string_view text) -> std::vector<RewriteRule>
{
    std::vector<RewriteRule> rules;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty()) {
            // optional "name:" prefix
            std::string name;
            auto colon = line.find(':');
            if (colon != std::string_view::npos && colon < line.find("=>")) {
                name = std::string(trim(line.substr(0, colon)));
                line = trim(line.substr(colon + 1));
            }
            rules.push_back(RewriteRule::parse(line, std::move(name)));
        }
        start = end + 1;
    }
    return rules;
}

auto load_rules(std::string const& path) -> std::vector<RewriteRule>
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open rule file '{}'", path));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_rules(buf.str());
}

auto default_rules_text() -> std::string_view { return kDefaultRules; }

auto default_rules() -> std::vector<RewriteRule> const&
{
    static std::vector<RewriteRule> const rules = parse_rules(kDefaultRules);
    return rules;
}

auto run_saturation(egraph::EGraph& g, std::vector<RewriteRule> const& rules, Budget budget) -> SaturationReport
{
    SaturationReport report;
    g.rebuild();
    if (rules.empty()) {
        report.saturated = true;
        return report;
    }
    std::vector<std::size_t> banned_until(rules.size(), 0);
    std::vector<unsigned> times_banned(rules.size(), 0);
    while (report.iterations < budget.max_iterations && g.node_count() < budget.max_nodes) {
        std::vector<std::pair<std::size_t, matchdb::Match>> pending;
        bool any_banned = false;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (report.iterations < banned_until[r]) {
                any_banned = true;
                continue;
            }
            auto shift = std::min(times_banned[r], 16U);
            auto limit = budget.match_limit << shift;
            auto matches = matchdb::match_pattern(g, rules[r].lhs, limit);
            if (matches.size() > limit) {
                banned_until[r] = report.iterations + 1 + (budget.ban_length << shift);
                ++times_banned[r];
                any_banned = true;
                continue;
            }
            for (auto& m : matches) {
                pending.emplace_back(r, std::move(m));
            }
        }
        std::size_t merged = 0;
        bool exhausted = false;
        for (auto const& [r, m] : pending) {
            if (g.node_count() >= budget.max_nodes) {
                exhausted = true;
                break;
            }
            auto id = matchdb::instantiate(g, rules[r].rhs, m.subst);
            if (g.find(id) != g.find(m.root)) {
                g.merge(id, m.root);
                ++merged;
            }
        }
        g.rebuild();
        ++report.iterations;
        report.merges += merged;
        if (merged == 0 && !exhausted && !any_banned) {
            report.saturated = true;
            break;
        }
    }
    return report;
}

auto simplify(egraph::EGraph& g, egraph::EClassId id, std::vector<RewriteRule> const& rules, Budget budget) -> expr::Expr
{
    run_saturation(g, rules, budget);
    return g.extract_best(g.find(id));
}

auto simplify(expr::Expr const& e, std::vector<RewriteRule> const& rules, Budget budget) -> expr::Expr
{
    egraph::EGraph scratch;
    auto id = scratch.add_expr(e);
    return simplify(scratch, id, rules, budget);
}

} // namespace egsr::eqsat
