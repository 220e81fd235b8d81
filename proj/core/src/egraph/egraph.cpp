// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/egraph/egraph.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include <fmt/format.h>

namespace egsr::egraph {

using expr::Expr;
using expr::Op;

auto leaf_of(Expr const& e) -> ENode
{
    switch (e.op) {
    case Op::Var: return ENode::variable(e.index);
    case Op::Param: return ENode::parameter(e.index);
    case Op::Const: return ENode::constant(e.value);
    default:
        throw EGraphError(fmt::format("'{}' is not a storable terminal", expr::symbol(e.op)));
    }
}

auto EGraph::find(EClassId id) const -> EClassId
{
    auto v = id.value;
    while (parent_[v] != v) {
        v = parent_[v];
    }
    return EClassId { v };
}

auto EGraph::find_compress(EClassId id) -> EClassId
{
    auto root = find(id).value;
    auto v = id.value;
    while (parent_[v] != root) {
        auto next = parent_[v];
        parent_[v] = root;
        v = next;
    }
    return EClassId { root };
}

auto EGraph::eclass(EClassId id) const -> EClass const&
{
    if (!contains(id)) {
        throw EGraphError(fmt::format("unknown e-class id {}", id.value));
    }
    return classes_[find(id).value];
}

auto EGraph::canonical_ids() const -> std::vector<EClassId>
{
    std::vector<EClassId> out;
    out.reserve(live_classes_);
    for (std::uint32_t i = 0; i < parent_.size(); ++i) {
        if (parent_[i] == i) {
            out.push_back(EClassId { i });
        }
    }
    return out;
}

auto EGraph::canonicalize(ENode node) const -> ENode
{
    for (auto& c : node.kids()) {
        c = find(c);
    }
    if (expr::is_commutative(node.op) && node.children[1] < node.children[0]) {
        std::swap(node.children[0], node.children[1]);
    }
    return node;
}

auto EGraph::make_data(ENode const& node) const -> ClassData
{
    if (node.is_leaf()) {
        return { 1, 1, node.op == Op::Const || node.op == Op::Param };
    }
    ClassData d { 0, expr::node_cost(node.op), true };
    std::uint32_t child_height = 0;
    for (auto c : node.kids()) {
        auto const& cd = classes_[find(c).value].data;
        if (cd.cost == ClassData::kInfiniteCost || d.cost == ClassData::kInfiniteCost) {
            d.cost = ClassData::kInfiniteCost;
        } else {
            d.cost += cd.cost;
        }
        child_height = std::max(child_height, cd.height);
        d.is_constant = d.is_constant && cd.is_constant;
    }
    d.height = child_height == ClassData::kInfiniteHeight ? ClassData::kInfiniteHeight : child_height + 1;
    return d;
}

namespace {
    void absorb(ClassData& into, ClassData const& from)
    {
        into.cost = std::min(into.cost, from.cost);
        into.height = std::min(into.height, from.height);
        into.is_constant = into.is_constant || from.is_constant;
    }
} // namespace

auto EGraph::add(ENode node) -> EClassId
{
    for (auto c : node.kids()) {
        if (!contains(c)) {
            throw EGraphError(fmt::format("unknown child e-class id {}", c.value));
        }
    }
    auto canon = canonicalize(node);
    if (auto it = hashcons_.find(canon); it != hashcons_.end()) {
        return find(it->second);
    }
    EClassId id { static_cast<std::uint32_t>(classes_.size()) };
    parent_.push_back(id.value);
    set_size_.push_back(1);
    auto data = make_data(canon);
    classes_.push_back(EClass { id, { canon }, {}, data });
    auto kids = canon.kids();
    for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i > 0 && kids[i] == kids[i - 1]) {
            continue;
        }
        classes_[kids[i].value].parents.emplace_back(canon, id);
    }
    hashcons_.emplace(canon, id);
    db_.insert(canon, id);
    ++live_classes_;
    ++node_count_;
    return id;
}

auto EGraph::add_expr(Expr const& e) -> EClassId
{
    if (e.is_leaf()) {
        return add(leaf_of(e));
    }
    if (expr::is_unary(e.op)) {
        auto c = add_expr(e.children[0]);
        return add(ENode::unary(e.op, c));
    }
    auto l = add_expr(e.children[0]);
    auto r = add_expr(e.children[1]);
    return add(ENode::binary(e.op, l, r));
}

auto EGraph::lookup(ENode node) const -> std::optional<EClassId>
{
    for (auto c : node.kids()) {
        if (!contains(c)) {
            return std::nullopt;
        }
    }
    auto it = hashcons_.find(canonicalize(node));
    if (it == hashcons_.end()) {
        return std::nullopt;
    }
    return find(it->second);
}

auto EGraph::lookup_expr(Expr const& e) const -> std::optional<EClassId>
{
    if (e.op == Op::PatVar) {
        return std::nullopt;
    }
    if (e.is_leaf()) {
        return lookup(leaf_of(e));
    }
    ENode node { e.op, 0, {} };
    for (std::size_t i = 0; i < e.children.size(); ++i) {
        auto c = lookup_expr(e.children[i]);
        if (!c) {
            return std::nullopt;
        }
        node.children[i] = *c;
    }
    return lookup(node);
}

auto EGraph::merge(EClassId a, EClassId b) -> EClassId
{
    if (!contains(a) || !contains(b)) {
        throw EGraphError(fmt::format("cannot merge unknown e-class ids {} and {}", a.value, b.value));
    }
    a = find_compress(a);
    b = find_compress(b);
    if (a == b) {
        return a;
    }
    // union by size, ties toward the smaller id
    auto winner = a;
    auto loser = b;
    if (set_size_[b.value] > set_size_[a.value] || (set_size_[b.value] == set_size_[a.value] && b < a)) {
        std::swap(winner, loser);
    }
    parent_[loser.value] = winner.value;
    set_size_[winner.value] += set_size_[loser.value];

    auto& w = classes_[winner.value];
    auto& l = classes_[loser.value];
    w.nodes.insert(w.nodes.end(), l.nodes.begin(), l.nodes.end());
    w.parents.insert(w.parents.end(), l.parents.begin(), l.parents.end());
    absorb(w.data, l.data);
    l.nodes.clear();
    l.nodes.shrink_to_fit();
    l.parents.clear();
    l.parents.shrink_to_fit();
    --live_classes_;

    pending_.push_back(winner);
    dirty_ = true;
    if (merge_callback_) {
        merge_callback_(winner, loser);
    }
    return winner;
}

void EGraph::repair(EClassId id)
{
    auto parents = std::move(classes_[id.value].parents);
    classes_[id.value].parents.clear();
    for (auto const& [node, owner] : parents) {
        hashcons_.erase(node);
    }
    for (auto const& [node, owner] : parents) {
        auto canon = canonicalize(node);
        auto [it, inserted] = hashcons_.try_emplace(canon, find(owner));
        if (!inserted && find(it->second) != find(owner)) {
            merge(it->second, owner);
        }
        it->second = find(owner);
    }
    std::map<ENode, EClassId> unique;
    for (auto const& [node, owner] : parents) {
        auto canon = canonicalize(node);
        auto [it, inserted] = unique.try_emplace(canon, owner);
        if (!inserted) {
            merge(it->second, owner);
        }
    }
    auto& target = classes_[find(id).value].parents;
    for (auto const& [node, owner] : unique) {
        target.emplace_back(canonicalize(node), find(owner));
    }
}

void EGraph::normalize()
{
    for (std::uint32_t i = 0; i < parent_.size(); ++i) {
        find_compress(EClassId { i });
    }
    hashcons_.clear();
    std::vector<std::pair<EClassId, EClassId>> conflicts;
    for (std::uint32_t i = 0; i < classes_.size(); ++i) {
        if (parent_[i] != i) {
            continue;
        }
        auto& nodes = classes_[i].nodes;
        for (auto& n : nodes) {
            n = canonicalize(n);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        for (auto const& n : nodes) {
            auto [it, inserted] = hashcons_.try_emplace(n, EClassId { i });
            if (!inserted && it->second.value != i) {
                conflicts.emplace_back(it->second, EClassId { i });
            }
        }
    }
    for (auto [a, b] : conflicts) {
        merge(a, b);
    }
}

void EGraph::rebuild()
{
    do {
        while (!pending_.empty()) {
            auto todo = std::move(pending_);
            pending_.clear();
            std::sort(todo.begin(), todo.end());
            todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
            for (auto id : todo) {
                repair(find_compress(id));
            }
        }
        if (!dirty_) {
            return;
        }
        normalize();
    } while (!pending_.empty());

    node_count_ = 0;
    for (auto& c : classes_) {
        c.parents.clear();
    }
    db_.clear();
    for (std::uint32_t i = 0; i < classes_.size(); ++i) {
        if (parent_[i] != i) {
            continue;
        }
        EClassId id { i };
        for (auto const& n : classes_[i].nodes) {
            ++node_count_;
            auto kids = n.kids();
            for (std::size_t k = 0; k < kids.size(); ++k) {
                if (k > 0 && kids[k] == kids[k - 1]) {
                    continue;
                }
                classes_[kids[k].value].parents.emplace_back(n, id);
            }
            db_.insert(n, id);
        }
    }
    recompute_data();
    dirty_ = false;
}

void EGraph::recompute_data()
{
    std::deque<std::uint32_t> queue;
    std::vector<char> queued(classes_.size(), 0);
    for (std::uint32_t i = 0; i < classes_.size(); ++i) {
        classes_[i].data = ClassData {};
        if (parent_[i] == i) {
            queue.push_back(i);
            queued[i] = 1;
        }
    }
    while (!queue.empty()) {
        auto i = queue.front();
        queue.pop_front();
        queued[i] = 0;
        ClassData d {};
        for (auto const& n : classes_[i].nodes) {
            absorb(d, make_data(n));
        }
        if (d == classes_[i].data) {
            continue;
        }
        classes_[i].data = d;
        for (auto const& [node, owner] : classes_[i].parents) {
            auto p = find(owner).value;
            if (queued[p] == 0) {
                queued[p] = 1;
                queue.push_back(p);
            }
        }
    }
}

auto EGraph::extract_best(EClassId id) const -> Expr
{
    if (pending_repairs()) {
        throw EGraphError("e-graph has pending merges; rebuild before extracting");
    }
    auto const& cls = eclass(id);
    if (cls.data.cost == ClassData::kInfiniteCost) {
        throw EGraphError(fmt::format("e-class {} has no finite-cost expression", id.value));
    }
    for (auto const& n : cls.nodes) {
        if (make_data(n).cost != cls.data.cost) {
            continue;
        }
        switch (n.op) {
        case Op::Var: return Expr::var(n.index());
        case Op::Param: return Expr::param(n.index());
        case Op::Const: return Expr::constant(n.constant_value());
        default: break;
        }
        if (expr::is_unary(n.op)) {
            return Expr::unary(n.op, extract_best(n.children[0]));
        }
        return Expr::binary(n.op, extract_best(n.children[0]), extract_best(n.children[1]));
    }
    throw EGraphError(fmt::format("e-class {} analysis is stale; rebuild before extracting", id.value));
}

auto EGraph::export_state() const -> GraphState
{
    GraphState s;
    s.parent.reserve(parent_.size());
    for (std::uint32_t i = 0; i < parent_.size(); ++i) {
        s.parent.push_back(find(EClassId { i }).value);
    }
    s.set_size = set_size_;
    s.nodes.reserve(classes_.size());
    for (std::uint32_t i = 0; i < classes_.size(); ++i) {
        s.nodes.push_back(parent_[i] == i ? classes_[i].nodes : std::vector<ENode> {});
    }
    return s;
}

auto EGraph::from_state(GraphState state) -> EGraph
{
    auto const n = state.parent.size();
    if (state.set_size.size() != n || state.nodes.size() != n) {
        throw EGraphError("inconsistent e-graph state: section lengths differ");
    }
    EGraph g;
    g.parent_ = std::move(state.parent);
    g.set_size_ = std::move(state.set_size);
    g.classes_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (g.parent_[i] >= n || g.parent_[g.parent_[i]] != g.parent_[i]) {
            throw EGraphError(fmt::format("inconsistent e-graph state: bad representative for {}", i));
        }
        g.classes_[i].id = EClassId { i };
        g.classes_[i].nodes = std::move(state.nodes[i]);
        for (auto const& node : g.classes_[i].nodes) {
            for (auto c : node.kids()) {
                if (c.value >= n) {
                    throw EGraphError(fmt::format("inconsistent e-graph state: child id {} out of range", c.value));
                }
            }
        }
        if (g.parent_[i] == i) {
            ++g.live_classes_;
        }
    }
    g.dirty_ = true;
    g.rebuild();
    return g;
}

auto EGraph::derive_db() const -> matchdb::PatternDB
{
    matchdb::PatternDB db;
    for (std::uint32_t i = 0; i < classes_.size(); ++i) {
        if (parent_[i] != i) {
            continue;
        }
        for (auto const& n : classes_[i].nodes) {
            db.insert(canonicalize(n), EClassId { i });
        }
    }
    return db;
}

} // namespace egsr::egraph
