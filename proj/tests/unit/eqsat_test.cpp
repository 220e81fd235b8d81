// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "egsr/eqsat/saturation.hpp"
#include "egsr/expr/parser.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using namespace egsr;
using egraph::EGraph;
using eqsat::RewriteRule;
using oracle::parse;

auto two_rules() -> std::vector<RewriteRule>
{
    return eqsat::parse_rules("v0 + v0 => 2 * v0\n(v0 / v1) * v2 => v0 * (v2 / v1)\n");
}

TEST(Rules, ParseNamedAndAnonymous)
{
    auto rules = eqsat::parse_rules("# comment\nzero: v0 + 0 => v0\n\n  v0 * 1 => v0  # trailing\n");
    ASSERT_EQ(rules.size(), 2U);
    EXPECT_EQ(rules[0].name, "zero");
    EXPECT_EQ(expr::render(rules[0].lhs), "(v0 + 0)");
    EXPECT_EQ(expr::render(rules[1].rhs), "v0");
    EXPECT_FALSE(rules[1].name.empty());
}

TEST(Rules, RejectMalformed)
{
    EXPECT_THROW((void)RewriteRule::parse("v0 + 0"), std::invalid_argument);
    EXPECT_THROW((void)RewriteRule::parse("v0 => v1"), std::invalid_argument);
    EXPECT_THROW((void)RewriteRule::parse("v0 + => v0"), expr::ParseError);
}

TEST(Rules, DefaultSetParses)
{
    EXPECT_GT(eqsat::default_rules().size(), 20U);
}

TEST(Rules, DefaultSetIsSoundPointwise)
{
    // each rule, instantiated with random subtrees, evaluates equally wherever
    // its left side is finite
    oracle::Rng rng(5);
    std::uniform_real_distribution<double> u(0.2, 2.5);
    oracle::GenOptions o;
    o.parameters = 0;
    for (auto const& rule : eqsat::default_rules()) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<expr::Expr> binding;
            for (int v = 0; v < 3; ++v) {
                binding.push_back(oracle::random_expr(rng, 5, o));
            }
            std::function<expr::Expr(expr::Expr const&)> fill = [&](expr::Expr const& p) -> expr::Expr {
                if (p.op == expr::Op::PatVar) {
                    return binding[p.index];
                }
                auto out = p;
                for (auto& c : out.children) {
                    c = fill(c);
                }
                return out;
            };
            auto lhs = fill(rule.lhs);
            auto rhs = fill(rule.rhs);
            std::vector<double> x { u(rng), u(rng), u(rng) };
            double a = oracle::eval_point(lhs, x, {});
            double b = oracle::eval_point(rhs, x, {});
            if (std::isfinite(a) && std::fabs(a) < 1e12) {
                EXPECT_TRUE(oracle::nearly_equal(a, b, 1e-9)) << rule.name << ": " << expr::render(lhs) << " = " << a
                                                              << " vs " << expr::render(rhs) << " = " << b;
            }
        }
    }
}

TEST(Saturation, OneIterationMergesTwice)
{
    EGraph g;
    auto root = g.add_expr(parse("(2 / x0) * (x0 + x0)"));
    auto report = eqsat::run_saturation(g, two_rules(), { 1, 1000 });
    EXPECT_EQ(report.iterations, 1U);
    EXPECT_EQ(report.merges, 2U);
    auto sum = g.lookup_expr(parse("x0 + x0"));
    auto twice = g.lookup_expr(parse("2 * x0"));
    ASSERT_TRUE(sum && twice);
    EXPECT_EQ(g.find(*sum), g.find(*twice));
    auto moved = g.lookup_expr(parse("2 * ((x0 + x0) / x0)"));
    ASSERT_TRUE(moved);
    EXPECT_EQ(g.find(*moved), g.find(root));
}

TEST(Saturation, EmptyRuleSetChangesNothing)
{
    EGraph g;
    g.add_expr(parse("sin(x0) + x1"));
    auto nodes = g.node_count();
    auto classes = g.class_count();
    auto r = eqsat::run_saturation(g, {});
    EXPECT_TRUE(r.saturated);
    EXPECT_EQ(r.merges, 0U);
    EXPECT_EQ(g.node_count(), nodes);
    EXPECT_EQ(g.class_count(), classes);
}

TEST(Saturation, IdentitiesCollapseToVariable)
{
    EGraph g;
    auto root = g.add_expr(parse("(x0 + 0) * 1"));
    auto x = *g.lookup_expr(parse("x0"));
    auto r = eqsat::run_saturation(g, eqsat::parse_rules("v0 + 0 => v0\nv0 * 1 => v0\n"));
    EXPECT_TRUE(r.saturated);
    EXPECT_EQ(g.find(root), g.find(x));
    EXPECT_EQ(g.extract_best(g.find(root)), expr::Expr::var(0));
}

TEST(Saturation, RespectsNodeBudget)
{
    EGraph g;
    g.add_expr(parse("x0 * (x1 + x2) * (x0 + x1) * (x2 + x0)"));
    auto r = eqsat::run_saturation(g, eqsat::default_rules(), { 50, 300 });
    EXPECT_FALSE(r.saturated);
    EXPECT_LT(r.iterations, 50U);
}

TEST(Saturation, ExplosiveRulesAreBackedOff)
{
    // associativity and commutativity blow up on this one without a scheduler
    EGraph g;
    g.add_expr(parse("x0 / cos(log(2 / (1 * (log(x1) * x2))))"));
    eqsat::Budget budget;
    auto r = eqsat::run_saturation(g, eqsat::default_rules(), budget);
    EXPECT_FALSE(r.saturated);
    EXPECT_LE(g.node_count(), budget.max_nodes + 64);
}

TEST(Saturation, BannedRuleBlocksSaturation)
{
    EGraph g;
    g.add_expr(parse("x0 + x1"));
    eqsat::Budget budget { 3, 1000, 0, 5 };
    auto r = eqsat::run_saturation(g, eqsat::parse_rules("v0 + v1 => v1 + v0"), budget);
    EXPECT_EQ(r.iterations, 3U);
    EXPECT_EQ(r.merges, 0U);
    EXPECT_FALSE(r.saturated);
}

TEST(Saturation, NodeCountNeverShrinks)
{
    EGraph g;
    g.add_expr(parse("(x0 * 1) + (x0 * 1) - (x1 / x1)"));
    auto rules = eqsat::default_rules();
    for (int i = 0; i < 4; ++i) {
        auto nodes = g.node_count();
        eqsat::run_saturation(g, rules, { 1, 100000 });
        EXPECT_GE(g.node_count(), nodes);
    }
}

TEST(Saturation, Deterministic)
{
    auto run = [] {
        EGraph g;
        auto id = g.add_expr(parse("log(x0 * exp(x1)) + (x0 / x0) * x1"));
        auto r = eqsat::run_saturation(g, eqsat::default_rules(), { 6, 20000 });
        return std::tuple(r, expr::render(g.extract_best(g.find(id))), g.node_count());
    };
    EXPECT_EQ(run(), run());
}

TEST(Simplify, DoubledVariableKeepsCost)
{
    auto e = parse("x0 + x0");
    auto s = eqsat::simplify(e, eqsat::parse_rules("v0 + v0 => 2 * v0"));
    EXPECT_LE(expr::cost_of(s), expr::cost_of(e));
}

TEST(Simplify, TwoRulesNeverIncreaseCost)
{
    // With only these two rules every member of the root class costs the
    // same, so the cost can only stay put.
    auto e = parse("(2 / x0) * (x0 + x0)");
    auto s = eqsat::simplify(e, two_rules());
    EXPECT_LE(expr::cost_of(s), expr::cost_of(e));
}

TEST(Simplify, DefaultRulesShrinkDoubledQuotient)
{
    auto e = parse("(2 / x0) * (x0 + x0)");
    auto s = eqsat::simplify(e, eqsat::default_rules(), { 8, 20000 });
    EXPECT_LT(expr::cost_of(s), expr::cost_of(e)) << expr::render(s);
}

TEST(Simplify, ZeroBudgetReturnsCurrentBest)
{
    auto e = parse("x0 * 1");
    EXPECT_EQ(eqsat::simplify(e, eqsat::default_rules(), { 0, 1000 }), e);
}

TEST(Simplify, PreservesValuesOnRandomExpressions)
{
    oracle::Rng rng(404);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    oracle::GenOptions o;
    o.parameters = 0;
    int compared = 0;
    for (int i = 0; i < 30; ++i) {
        auto e = oracle::random_expr(rng, 12, o);
        auto s = eqsat::simplify(e, eqsat::default_rules(), { 6, 5000 });
        EXPECT_LE(expr::cost_of(s), expr::cost_of(e));
        for (int k = 0; k < 100; ++k) {
            std::vector<double> x { u(rng), u(rng), u(rng) };
            double a = oracle::eval_point(e, x, {});
            if (!std::isfinite(a)) {
                continue;
            }
            double b = oracle::eval_point(s, x, {});
            ++compared;
            ASSERT_TRUE(oracle::nearly_equal(a, b, 1e-9)) << expr::render(e) << " -> " << expr::render(s) << " at " << x[0]
                                                          << "," << x[1] << "," << x[2] << ": " << a << " vs " << b;
        }
    }
    EXPECT_GT(compared, 1000);
}

} // namespace
