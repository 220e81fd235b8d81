// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_CATALOG_CATALOG_HPP
#define EGSR_CATALOG_CATALOG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string_view>
#include <tuple>
#include <vector>

#include "egsr/egraph/egraph.hpp"
#include "egsr/expr/expr.hpp"
#include "egsr/fitdata/model.hpp"

namespace egsr::catalog {

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Criterion : std::uint8_t { Fitness, Dl };
enum class Field : std::uint8_t { Size, Cost, Parameters };
enum class Comparison : std::uint8_t { Lt, Le, Eq, Gt, Ge };

auto criterion_name(Criterion c) -> std::string_view;
auto field_name(Field f) -> std::string_view;
auto comparison_symbol(Comparison c) -> std::string_view;

[[nodiscard]] constexpr auto compare(std::int64_t value, Comparison cmp, std::int64_t bound) noexcept -> bool
{
    switch (cmp) {
    case Comparison::Lt: return value < bound;
    case Comparison::Le: return value <= bound;
    case Comparison::Eq: return value == bound;
    case Comparison::Gt: return value > bound;
    case Comparison::Ge: return value >= bound;
    }
    return false;
}

struct FilterAtom {
    Field field { Field::Size };
    Comparison cmp { Comparison::Lt };
    std::int64_t bound { 0 };

    friend auto operator==(FilterAtom const&, FilterAtom const&) -> bool = default;
};

// Conjunction of atoms; the empty filter accepts everything.
struct Filter {
    std::vector<FilterAtom> atoms;

    // `cost` is the e-class minimum cost.
    [[nodiscard]] auto accepts(fitdata::FitRecord const& record, std::int64_t cost) const -> bool;

    friend auto operator==(Filter const&, Filter const&) -> bool = default;
};

struct PatternConstraint {
    expr::Pattern pattern;
    bool negated { false };
    bool root_only { false };

    friend auto operator==(PatternConstraint const&, PatternConstraint const&) -> bool = default;
};

struct Entry {
    egraph::EClassId id;
    expr::Expr expr;
    fitdata::FitRecord record;
};

// Registry of evaluated e-classes with fitness and DL orderings and per-size
// buckets for the Pareto sweep. Ties break by smaller size, then smaller id.
class ScoreCatalog {
public:
    // Inserts or improves the record of `id`. A record with better fitness
    // replaces the stored one; an equal fitness only lowers the DL. Returns
    // true when anything changed. Throws CatalogError on non-finite fitness.
    auto add(egraph::EClassId id, expr::Expr const& e, fitdata::FitRecord record) -> bool;

    // Records a DL for a registered id.
    void set_dl(egraph::EClassId id, double dl);

    // Replaces the record of a registered id unconditionally.
    void replace(egraph::EClassId id, fitdata::FitRecord record);

    void erase(egraph::EClassId id);

    // Folds the entry of `absorbed` into `survivor`, keeping the better one.
    void merge(egraph::EClassId survivor, egraph::EClassId absorbed);

    [[nodiscard]] auto find(egraph::EClassId id) const -> Entry const*;
    [[nodiscard]] auto size() const noexcept -> std::size_t { return entries_.size(); }
    [[nodiscard]] auto empty() const noexcept -> bool { return entries_.empty(); }
    [[nodiscard]] auto dl_count() const noexcept -> std::size_t { return by_dl_.size(); }

    // Ids in criterion order.
    [[nodiscard]] auto ordered(Criterion criterion) const -> std::vector<egraph::EClassId>;
    // Entries in id order.
    [[nodiscard]] auto entries() const -> std::vector<Entry const*>;

    [[nodiscard]] auto top(egraph::EGraph const& g, std::size_t n, Filter const& filter, Criterion criterion,
        std::optional<PatternConstraint> const& constraint = std::nullopt) const -> std::vector<Entry const*>;

    // Per-size bucket bests that strictly improve on every smaller size.
    [[nodiscard]] auto pareto(Criterion criterion) const -> std::vector<Entry const*>;

    void clear();

private:
    // (-fitness, size, id) and (dl, size, id), ascending.
    using Key = std::tuple<double, std::size_t, std::uint32_t>;

    struct Bucket {
        std::set<Key> by_fitness;
        std::set<Key> by_dl;
    };

    void index(Entry const& e);
    void unindex(Entry const& e);
    void require_dl() const;

    std::map<std::uint32_t, Entry> entries_;
    std::set<Key> by_fitness_;
    std::set<Key> by_dl_;
    std::vector<Bucket> buckets_;
};

// Canonical ids a pattern constraint selects before negation: match roots,
// or their upward closure unless `root_only`.
auto constraint_ids(egraph::EGraph const& g, PatternConstraint const& c) -> std::vector<egraph::EClassId>;

} // namespace egsr::catalog

#endif
