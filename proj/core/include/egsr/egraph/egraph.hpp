// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_EGRAPH_EGRAPH_HPP
#define EGSR_EGRAPH_EGRAPH_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "egsr/egraph/enode.hpp"
#include "egsr/expr/expr.hpp"
#include "egsr/matchdb/pattern_db.hpp"

namespace egsr::egraph {

class EGraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Analysis data attached to every e-class.
struct ClassData {
    static constexpr std::int64_t kInfiniteCost = std::numeric_limits<std::int64_t>::max();
    static constexpr std::uint32_t kInfiniteHeight = std::numeric_limits<std::uint32_t>::max();

    std::uint32_t height { kInfiniteHeight };
    std::int64_t cost { kInfiniteCost };
    bool is_constant { false };

    friend auto operator==(ClassData const&, ClassData const&) -> bool = default;
};

struct EClass {
    EClassId id;
    std::vector<ENode> nodes;
    // (parent e-node, class owning it) for every e-node using this class as a child.
    std::vector<std::pair<ENode, EClassId>> parents;
    ClassData data;
};

// Raw union-find and e-node layout, enough to rebuild every derived index.
struct GraphState {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> set_size;
    std::vector<std::vector<ENode>> nodes; // empty for non-canonical ids
};

class EGraph {
public:
    // Called as (surviving id, absorbed id) each time two classes merge.
    using MergeCallback = std::function<void(EClassId, EClassId)>;

    EGraph() = default;

    auto add(ENode node) -> EClassId;
    auto add_expr(expr::Expr const& e) -> EClassId;

    [[nodiscard]] auto lookup(ENode node) const -> std::optional<EClassId>;
    [[nodiscard]] auto lookup_expr(expr::Expr const& e) const -> std::optional<EClassId>;

    [[nodiscard]] auto find(EClassId id) const -> EClassId;
    auto merge(EClassId a, EClassId b) -> EClassId;
    // Restores congruence and the hashcons, node, parent, database and
    // analysis invariants after merges.
    void rebuild();

    [[nodiscard]] auto extract_best(EClassId id) const -> expr::Expr;

    [[nodiscard]] auto contains(EClassId id) const noexcept -> bool { return id.value < classes_.size(); }
    [[nodiscard]] auto is_canonical(EClassId id) const -> bool { return contains(id) && find(id) == id; }
    [[nodiscard]] auto eclass(EClassId id) const -> EClass const&;
    [[nodiscard]] auto data(EClassId id) const -> ClassData const& { return eclass(id).data; }
    [[nodiscard]] auto canonical_ids() const -> std::vector<EClassId>;
    [[nodiscard]] auto class_count() const noexcept -> std::size_t { return live_classes_; }
    [[nodiscard]] auto node_count() const noexcept -> std::size_t { return node_count_; }
    [[nodiscard]] auto id_bound() const noexcept -> std::size_t { return classes_.size(); }
    [[nodiscard]] auto db() const noexcept -> matchdb::PatternDB const& { return db_; }
    [[nodiscard]] auto hashcons_size() const noexcept -> std::size_t { return hashcons_.size(); }
    [[nodiscard]] auto pending_repairs() const noexcept -> bool { return !pending_.empty() || dirty_; }

    // Children canonical, commutative children sorted ascending.
    [[nodiscard]] auto canonicalize(ENode node) const -> ENode;

    void on_merge(MergeCallback callback) { merge_callback_ = std::move(callback); }

    [[nodiscard]] auto export_state() const -> GraphState;
    static auto from_state(GraphState state) -> EGraph;

    // Pattern database rebuilt from the canonical e-nodes, for sync checks.
    [[nodiscard]] auto derive_db() const -> matchdb::PatternDB;

private:
    auto make_data(ENode const& node) const -> ClassData;
    void repair(EClassId id);
    void normalize();
    void recompute_data();

    auto find_compress(EClassId id) -> EClassId;

    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> set_size_;
    std::vector<EClass> classes_;
    std::unordered_map<ENode, EClassId> hashcons_;
    matchdb::PatternDB db_;
    std::vector<EClassId> pending_;
    bool dirty_ { false };
    std::size_t live_classes_ { 0 };
    std::size_t node_count_ { 0 };
    MergeCallback merge_callback_;
};

} // namespace egsr::egraph

#endif
