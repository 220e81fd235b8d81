// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/blocks/blocks.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "egsr/matchdb/matcher.hpp"

namespace egsr::blocks {

using egraph::EClassId;
using egraph::ENode;
using expr::Op;

void PatternList::push(std::span<std::uint32_t const> code)
{
    codes_.insert(codes_.end(), code.begin(), code.end());
    offsets_.push_back(codes_.size());
}

void PatternList::push_binary(std::uint32_t op, std::span<std::uint32_t const> lhs, std::span<std::uint32_t const> rhs)
{
    codes_.push_back(op);
    codes_.insert(codes_.end(), lhs.begin(), lhs.end());
    codes_.insert(codes_.end(), rhs.begin(), rhs.end());
    offsets_.push_back(codes_.size());
}

void PatternList::push_unary(std::uint32_t op, std::span<std::uint32_t const> child)
{
    codes_.push_back(op);
    codes_.insert(codes_.end(), child.begin(), child.end());
    offsets_.push_back(codes_.size());
}

void PatternList::reserve(std::size_t patterns, std::size_t codes)
{
    offsets_.reserve(patterns + 1);
    codes_.reserve(codes);
}

namespace {

    constexpr std::uint32_t kWildcard = encode(Op::PatVar);
    constexpr std::uint32_t kParameter = encode(Op::Param);

    auto best_node(egraph::EGraph const& g, EClassId id) -> ENode const&
    {
        auto const& cls = g.eclass(id);
        ENode const* best = nullptr;
        std::int64_t best_cost = egraph::ClassData::kInfiniteCost;
        for (auto const& n : cls.nodes) {
            std::int64_t c = expr::node_cost(n.op);
            for (auto k : n.kids()) {
                auto kc = g.data(g.find(k)).cost;
                c = kc == egraph::ClassData::kInfiniteCost ? kc : c + kc;
                if (c == egraph::ClassData::kInfiniteCost) {
                    break;
                }
            }
            if (best == nullptr || c < best_cost) {
                best = &n;
                best_cost = c;
            }
        }
        if (best == nullptr || best_cost == egraph::ClassData::kInfiniteCost) {
            throw egraph::EGraphError(fmt::format("e-class {} has no finite expression", id.value));
        }
        return *best;
    }

    class Miner {
    public:
        explicit Miner(egraph::EGraph const& g)
            : g_(g)
        {
        }

        auto run(EClassId id, std::size_t cap) -> PatternList const&
        {
            id = g_.find(id);
            auto key = std::pair { id.value, cap };
            if (auto it = memo_.find(key); it != memo_.end()) {
                return it->second;
            }
            PatternList out;
            std::uint32_t const v = kWildcard;
            out.push({ &v, 1 });
            auto const& n = best_node(g_, id);
            if (n.arity() == 0) {
                std::uint32_t leaf = n.op == Op::Var ? encode(Op::Var, n.index()) : kParameter;
                out.push({ &leaf, 1 });
            } else if (n.arity() == 1) {
                if (cap >= 2) {
                    auto const& child = run(n.children[0], cap - 1);
                    auto op = encode(n.op);
                    for (std::size_t i = 0; i < child.size(); ++i) {
                        out.push_unary(op, child[i]);
                    }
                }
            } else if (cap >= 3) {
                auto const& lhs = run(n.children[0], cap - 2);
                // identical children share one recursion
                auto const& rhs = g_.find(n.children[0]) == g_.find(n.children[1]) ? lhs : run(n.children[1], cap - 2);
                auto op = encode(n.op);
                for (std::size_t i = 0; i < lhs.size(); ++i) {
                    auto l = lhs[i];
                    for (std::size_t j = 0; j < rhs.size(); ++j) {
                        auto r = rhs[j];
                        if (1 + l.size() + r.size() <= cap) {
                            out.push_binary(op, l, r);
                        }
                    }
                }
            }
            return memo_.emplace(key, std::move(out)).first->second;
        }

    private:
        egraph::EGraph const& g_;
        std::map<std::pair<std::uint32_t, std::size_t>, PatternList> memo_;
    };

    auto decode(std::span<std::uint32_t const> code, std::size_t& pos, std::uint32_t& next_v, std::uint32_t& next_t) -> expr::Pattern
    {
        if (pos >= code.size()) {
            throw std::invalid_argument("truncated pattern code");
        }
        auto c = code[pos++];
        auto op = code_op(c);
        switch (expr::arity(op)) {
        case 0:
            if (op == Op::PatVar) {
                return expr::Expr::pattern_var(next_v++);
            }
            if (op == Op::Var) {
                return expr::Expr::var(code_index(c));
            }
            return expr::Expr::param(next_t++);
        case 1: return expr::Expr::unary(op, decode(code, pos, next_v, next_t));
        default: {
            auto lhs = decode(code, pos, next_v, next_t);
            auto rhs = decode(code, pos, next_v, next_t);
            return expr::Expr::binary(op, std::move(lhs), std::move(rhs));
        }
        }
    }

} // namespace

auto get_patterns(egraph::EGraph const& g, EClassId id, std::optional<std::size_t> cap) -> PatternList
{
    if (g.pending_repairs()) {
        throw std::logic_error("get_patterns requires a rebuilt e-graph");
    }
    Miner miner(g);
    auto limit = cap.value_or(std::numeric_limits<std::size_t>::max());
    if (limit == 0) {
        return {};
    }
    return miner.run(id, limit);
}

auto to_pattern(std::span<std::uint32_t const> code) -> expr::Pattern
{
    std::size_t pos = 0;
    std::uint32_t next_v = 0;
    std::uint32_t next_t = 0;
    auto p = decode(code, pos, next_v, next_t);
    if (pos != code.size()) {
        throw std::invalid_argument("trailing codes after pattern");
    }
    return p;
}

auto render_code(std::span<std::uint32_t const> code) -> std::string { return expr::render(to_pattern(code)); }

auto CodeHash::operator()(Code const& c) const noexcept -> std::size_t
{
    std::size_t h = c.size();
    for (auto x : c) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6U) + (h >> 2U);
    }
    return h;
}

void accumulate(BlockStats& stats, PatternList const& patterns, double fitness, std::optional<catalog::FilterAtom> const& size_filter)
{
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        auto p = patterns[i];
        if (size_filter && !catalog::compare(static_cast<std::int64_t>(p.size()), size_filter->cmp, size_filter->bound)) {
            continue;
        }
        auto& s = stats[Code(p.begin(), p.end())];
        ++s.count;
        s.fitness_sum += fitness;
    }
}

auto count_pattern(egraph::EGraph const& g, expr::Pattern const& p) -> std::size_t
{
    auto roots = matchdb::match_roots(g, p);
    return matchdb::closure_of_matches(g, roots).size();
}

auto mining_cap(DistributionQuery const& q) -> std::size_t
{
    if (!q.size_cmp) {
        return kMaxPatternSize;
    }
    auto b = q.size_bound;
    std::int64_t cap = 0;
    switch (*q.size_cmp) {
    case catalog::Comparison::Lt: cap = b - 1; break;
    case catalog::Comparison::Le:
    case catalog::Comparison::Eq: cap = b; break;
    case catalog::Comparison::Gt:
    case catalog::Comparison::Ge: cap = static_cast<std::int64_t>(kMaxPatternSize); break;
    }
    if (cap > static_cast<std::int64_t>(kMaxPatternSize)) {
        throw std::invalid_argument(fmt::format("building blocks are limited to size {}", kMaxPatternSize));
    }
    return static_cast<std::size_t>(std::max<std::int64_t>(cap, 0));
}

auto distribution(egraph::EGraph const& g, catalog::ScoreCatalog const& cat, DistributionQuery const& q) -> std::vector<DistributionRow>
{
    auto cap = mining_cap(q);
    std::vector<DistributionRow> rows;
    if (cap == 0) {
        return rows;
    }
    std::optional<catalog::FilterAtom> size_filter;
    if (q.size_cmp) {
        size_filter = catalog::FilterAtom { catalog::Field::Size, *q.size_cmp, q.size_bound };
    }
    auto ids = cat.ordered(catalog::Criterion::Fitness);
    if (q.from_top && *q.from_top < ids.size()) {
        ids.resize(*q.from_top);
    }
    BlockStats stats;
    for (auto id : ids) {
        auto const* e = cat.find(id);
        auto cls = g.find(id);
        accumulate(stats, get_patterns(g, cls, cap), e->record.fitness, size_filter);
    }
    rows.reserve(stats.size());
    for (auto const& [code, s] : stats) {
        if (s.count < q.min_count) {
            continue;
        }
        rows.push_back({ render_code(code), s.count, s.average() });
    }
    auto by_count = [](DistributionRow const& a, DistributionRow const& b) {
        if (a.count != b.count) {
            return a.count > b.count;
        }
        if (a.avg_fitness != b.avg_fitness) {
            return a.avg_fitness > b.avg_fitness;
        }
        return a.pattern < b.pattern;
    };
    auto by_fitness = [](DistributionRow const& a, DistributionRow const& b) {
        if (a.avg_fitness != b.avg_fitness) {
            return a.avg_fitness > b.avg_fitness;
        }
        if (a.count != b.count) {
            return a.count > b.count;
        }
        return a.pattern < b.pattern;
    };
    if (q.order == Order::Count) {
        std::sort(rows.begin(), rows.end(), by_count);
    } else {
        std::sort(rows.begin(), rows.end(), by_fitness);
    }
    if (q.limit && *q.limit < rows.size()) {
        rows.resize(*q.limit);
    }
    return rows;
}

} // namespace egsr::blocks
