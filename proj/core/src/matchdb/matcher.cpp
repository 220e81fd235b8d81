// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/matchdb/matcher.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace egsr::matchdb {

using egraph::EClassId;
using egraph::EGraph;
using egraph::ENode;
using expr::Expr;
using expr::Op;

auto Substitution::var(std::uint32_t index) const -> std::optional<EClassId>
{
    auto it = vars.find(index);
    if (it == vars.end()) {
        return std::nullopt;
    }
    return it->second;
}

namespace {

    constexpr int kUnbound = -1;

    // One conjunctive atom per non-variable pattern node: token(self, kids...).
    struct Atom {
        Token token;
        int self { 0 };
        std::array<int, 2> kids { 0, 0 };
        int arity { 0 };
        bool commutative { false };
    };

    // Pattern flattened into binding slots. Every pattern node owns a slot,
    // except that repeated pattern variables share theirs.
    struct Query {
        std::vector<Atom> atoms;          // pre-order over non-variable nodes
        std::vector<int> position_slot;   // pre-order over all nodes
        std::map<std::uint32_t, int> var_slot;
        int slot_count { 0 };

        auto compile(Expr const& p) -> int
        {
            if (p.op == Op::PatVar) {
                auto [it, inserted] = var_slot.try_emplace(p.index, slot_count);
                if (inserted) {
                    ++slot_count;
                }
                position_slot.push_back(it->second);
                return it->second;
            }
            int self = slot_count++;
            position_slot.push_back(self);
            Atom atom;
            atom.self = self;
            atom.arity = expr::arity(p.op);
            atom.commutative = expr::is_commutative(p.op);
            switch (p.op) {
            case Op::Param: atom.token = Token::any_parameter(); break;
            case Op::Var: atom.token = Token::of(ENode::variable(p.index)); break;
            case Op::Const: atom.token = Token::of(ENode::constant(p.value)); break;
            default: atom.token = Token { p.op, 0 }; break;
            }
            auto index = atoms.size();
            atoms.push_back(atom);
            for (std::size_t i = 0; i < p.children.size(); ++i) {
                atoms[index].kids[i] = compile(p.children[i]);
            }
            return self;
        }
    };

    class Search {
    public:
        Search(EGraph const& g, Query const& q, std::size_t limit)
            : db_(g.db())
            , q_(q)
            , binding_(static_cast<std::size_t>(q.slot_count), kUnbound)
            , limit_(limit)
        {
        }

        auto run() -> std::set<std::vector<int>>
        {
            solve(0);
            return std::move(found_);
        }

    private:
        void solve(std::size_t atom_index)
        {
            if (atom_index == q_.atoms.size()) {
                found_.insert(binding_);
                return;
            }
            if (found_.size() > limit_) {
                return;
            }
            auto const& atom = q_.atoms[atom_index];
            auto const* trie = db_.lookup(atom.token);
            if (trie == nullptr) {
                return;
            }
            if (atom.arity == 2 && atom.commutative && atom.kids[0] != atom.kids[1]) {
                step(*trie, atom, atom_index, { 0, 1 }, -1);
                step(*trie, atom, atom_index, { 1, 0 }, -1);
            } else {
                step(*trie, atom, atom_index, { 0, 1 }, -1);
            }
        }

        // Walks one trie level per slot: first the atom's own class, then
        // each child in `order`. Bound slots are checked by lookup (the
        // intersection step); unbound slots enumerate the level's keys.
        void step(Trie const& level, Atom const& atom, std::size_t atom_index, std::array<int, 2> order, int depth)
        {
            if (depth == atom.arity) {
                solve(atom_index + 1);
                return;
            }
            int slot = depth < 0 ? atom.self : atom.kids[static_cast<std::size_t>(order[static_cast<std::size_t>(depth)])];
            auto& bound = binding_[static_cast<std::size_t>(slot)];
            if (bound != kUnbound) {
                if (auto const* next = level.find(static_cast<std::uint32_t>(bound))) {
                    step(*next, atom, atom_index, order, depth + 1);
                }
                return;
            }
            auto const& keys = level.keys();
            for (std::size_t i = 0; i < keys.size() && found_.size() <= limit_; ++i) {
                bound = static_cast<int>(keys[i]);
                step(level.child_at(i), atom, atom_index, order, depth + 1);
            }
            bound = kUnbound;
        }

        PatternDB const& db_;
        Query const& q_;
        std::vector<int> binding_;
        std::set<std::vector<int>> found_;
        std::size_t limit_;
    };

    auto instantiate_rec(EGraph& g, Expr const& p, Substitution const& s) -> EClassId
    {
        switch (p.op) {
        case Op::PatVar: {
            auto id = s.var(p.index);
            if (!id) {
                throw std::invalid_argument(fmt::format("pattern variable v{} is unbound", p.index));
            }
            return g.find(*id);
        }
        case Op::Var:
        case Op::Param:
        case Op::Const:
            return g.add(egraph::leaf_of(p));
        default:
            break;
        }
        if (expr::is_unary(p.op)) {
            return g.add(ENode::unary(p.op, instantiate_rec(g, p.children[0], s)));
        }
        auto l = instantiate_rec(g, p.children[0], s);
        auto r = instantiate_rec(g, p.children[1], s);
        return g.add(ENode::binary(p.op, l, r));
    }

} // namespace

auto match_pattern(EGraph const& g, expr::Pattern const& pattern, std::size_t limit) -> std::vector<Match>
{
    if (g.pending_repairs()) {
        throw std::logic_error("match_pattern requires a rebuilt e-graph");
    }
    Query q;
    q.compile(pattern);
    std::vector<Match> out;

    auto emit = [&](std::vector<int> const& binding) {
        Match m;
        m.root = EClassId { static_cast<std::uint32_t>(binding[static_cast<std::size_t>(q.position_slot[0])]) };
        m.subst.positions.reserve(q.position_slot.size());
        for (auto slot : q.position_slot) {
            m.subst.positions.push_back(EClassId { static_cast<std::uint32_t>(binding[static_cast<std::size_t>(slot)]) });
        }
        for (auto [index, slot] : q.var_slot) {
            m.subst.vars.emplace(index, EClassId { static_cast<std::uint32_t>(binding[static_cast<std::size_t>(slot)]) });
        }
        out.push_back(std::move(m));
    };

    if (q.atoms.empty()) {
        // a bare pattern variable matches every class, bound to itself
        for (auto id : g.canonical_ids()) {
            if (out.size() > limit) {
                break;
            }
            emit(std::vector<int> { static_cast<int>(id.value) });
        }
        return out;
    }
    for (auto const& binding : Search(g, q, limit).run()) {
        emit(binding);
    }
    std::stable_sort(out.begin(), out.end(), [](Match const& a, Match const& b) { return a.root < b.root; });
    return out;
}

auto match_roots(EGraph const& g, expr::Pattern const& pattern) -> std::vector<EClassId>
{
    std::vector<EClassId> roots;
    for (auto const& m : match_pattern(g, pattern)) {
        if (roots.empty() || roots.back() != m.root) {
            roots.push_back(m.root);
        }
    }
    return roots;
}

auto closure_of_matches(EGraph const& g, std::span<EClassId const> ids) -> std::vector<EClassId>
{
    std::vector<char> seen(g.id_bound(), 0);
    std::vector<EClassId> stack;
    std::vector<EClassId> out;
    for (auto id : ids) {
        auto c = g.find(id);
        if (seen[c.value] == 0) {
            seen[c.value] = 1;
            stack.push_back(c);
        }
    }
    while (!stack.empty()) {
        auto c = stack.back();
        stack.pop_back();
        out.push_back(c);
        for (auto const& [node, owner] : g.eclass(c).parents) {
            auto p = g.find(owner);
            if (seen[p.value] == 0) {
                seen[p.value] = 1;
                stack.push_back(p);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

auto instantiate(EGraph& g, expr::Pattern const& pattern, Substitution const& subst) -> EClassId
{
    return instantiate_rec(g, pattern, subst);
}

} // namespace egsr::matchdb
