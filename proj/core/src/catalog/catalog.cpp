// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/catalog/catalog.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "egsr/matchdb/matcher.hpp"

namespace egsr::catalog {

using egraph::EClassId;

auto criterion_name(Criterion c) -> std::string_view { return c == Criterion::Fitness ? "fitness" : "dl"; }

auto field_name(Field f) -> std::string_view
{
    switch (f) {
    case Field::Size: return "size";
    case Field::Cost: return "cost";
    case Field::Parameters: return "parameters";
    }
    return "?";
}

auto comparison_symbol(Comparison c) -> std::string_view
{
    switch (c) {
    case Comparison::Lt: return "<";
    case Comparison::Le: return "<=";
    case Comparison::Eq: return "=";
    case Comparison::Gt: return ">";
    case Comparison::Ge: return ">=";
    }
    return "?";
}

auto Filter::accepts(fitdata::FitRecord const& record, std::int64_t cost) const -> bool
{
    for (auto const& a : atoms) {
        std::int64_t value = 0;
        switch (a.field) {
        case Field::Size: value = static_cast<std::int64_t>(record.size); break;
        case Field::Cost: value = cost; break;
        case Field::Parameters: value = static_cast<std::int64_t>(record.n_params); break;
        }
        if (!compare(value, a.cmp, a.bound)) {
            return false;
        }
    }
    return true;
}

void ScoreCatalog::index(Entry const& e)
{
    auto const& r = e.record;
    if (buckets_.size() <= r.size) {
        buckets_.resize(r.size + 1);
    }
    Key fk { -r.fitness, r.size, e.id.value };
    by_fitness_.insert(fk);
    buckets_[r.size].by_fitness.insert(fk);
    if (r.dl) {
        Key dk { *r.dl, r.size, e.id.value };
        by_dl_.insert(dk);
        buckets_[r.size].by_dl.insert(dk);
    }
}

void ScoreCatalog::unindex(Entry const& e)
{
    auto const& r = e.record;
    Key fk { -r.fitness, r.size, e.id.value };
    by_fitness_.erase(fk);
    buckets_[r.size].by_fitness.erase(fk);
    if (r.dl) {
        Key dk { *r.dl, r.size, e.id.value };
        by_dl_.erase(dk);
        buckets_[r.size].by_dl.erase(dk);
    }
}

auto ScoreCatalog::add(EClassId id, expr::Expr const& e, fitdata::FitRecord record) -> bool
{
    if (!std::isfinite(record.fitness)) {
        throw CatalogError(fmt::format("refusing to register id {} with non-finite fitness", id.value));
    }
    if (record.dl && !std::isfinite(*record.dl)) {
        record.dl.reset();
    }
    auto it = entries_.find(id.value);
    if (it == entries_.end()) {
        auto& entry = entries_[id.value] = Entry { id, e, std::move(record) };
        index(entry);
        return true;
    }
    auto& entry = it->second;
    if (record.fitness > entry.record.fitness) {
        unindex(entry);
        entry.expr = e;
        entry.record = std::move(record);
        index(entry);
        return true;
    }
    if (record.fitness == entry.record.fitness && record.dl && (!entry.record.dl || *record.dl < *entry.record.dl)) {
        set_dl(id, *record.dl);
        return true;
    }
    return false;
}

void ScoreCatalog::set_dl(EClassId id, double dl)
{
    auto it = entries_.find(id.value);
    if (it == entries_.end()) {
        throw CatalogError(fmt::format("unknown id {}", id.value));
    }
    unindex(it->second);
    it->second.record.dl = std::isfinite(dl) ? std::optional<double>(dl) : std::nullopt;
    index(it->second);
}

void ScoreCatalog::replace(EClassId id, fitdata::FitRecord record)
{
    auto it = entries_.find(id.value);
    if (it == entries_.end()) {
        throw CatalogError(fmt::format("unknown id {}", id.value));
    }
    if (!std::isfinite(record.fitness)) {
        throw CatalogError(fmt::format("refusing to register id {} with non-finite fitness", id.value));
    }
    unindex(it->second);
    it->second.record = std::move(record);
    index(it->second);
}

void ScoreCatalog::erase(EClassId id)
{
    auto it = entries_.find(id.value);
    if (it == entries_.end()) {
        return;
    }
    unindex(it->second);
    entries_.erase(it);
}

void ScoreCatalog::merge(EClassId survivor, EClassId absorbed)
{
    if (survivor == absorbed) {
        return;
    }
    auto it = entries_.find(absorbed.value);
    if (it == entries_.end()) {
        return;
    }
    Entry moved = std::move(it->second);
    unindex(moved);
    entries_.erase(it);
    add(survivor, moved.expr, std::move(moved.record));
}

auto ScoreCatalog::find(EClassId id) const -> Entry const*
{
    auto it = entries_.find(id.value);
    return it == entries_.end() ? nullptr : &it->second;
}

auto ScoreCatalog::ordered(Criterion criterion) const -> std::vector<EClassId>
{
    auto const& keys = criterion == Criterion::Fitness ? by_fitness_ : by_dl_;
    std::vector<EClassId> out;
    out.reserve(keys.size());
    for (auto const& k : keys) {
        out.push_back(EClassId { std::get<2>(k) });
    }
    return out;
}

auto ScoreCatalog::entries() const -> std::vector<Entry const*>
{
    std::vector<Entry const*> out;
    out.reserve(entries_.size());
    for (auto const& [_, e] : entries_) {
        out.push_back(&e);
    }
    return out;
}

void ScoreCatalog::require_dl() const
{
    if (by_dl_.empty()) {
        throw CatalogError("no description lengths recorded; start with --calculate-dl or run report on an id first");
    }
}

auto constraint_ids(egraph::EGraph const& g, PatternConstraint const& c) -> std::vector<EClassId>
{
    auto roots = matchdb::match_roots(g, c.pattern);
    if (c.root_only) {
        return roots;
    }
    return matchdb::closure_of_matches(g, roots);
}

auto ScoreCatalog::top(egraph::EGraph const& g, std::size_t n, Filter const& filter, Criterion criterion,
    std::optional<PatternConstraint> const& constraint) const -> std::vector<Entry const*>
{
    if (criterion == Criterion::Dl) {
        require_dl();
    }
    std::vector<Entry const*> out;
    if (n == 0) {
        return out;
    }
    std::vector<EClassId> matched;
    if (constraint) {
        matched = constraint_ids(g, *constraint);
    }
    auto const& keys = criterion == Criterion::Fitness ? by_fitness_ : by_dl_;
    for (auto const& k : keys) {
        auto const& e = entries_.at(std::get<2>(k));
        auto cls = g.contains(e.id) ? g.find(e.id) : e.id;
        auto cost = g.contains(cls) ? g.data(cls).cost : expr::cost_of(e.expr);
        if (!filter.accepts(e.record, cost)) {
            continue;
        }
        if (constraint) {
            bool hit = std::binary_search(matched.begin(), matched.end(), cls);
            if (hit == constraint->negated) {
                continue;
            }
        }
        out.push_back(&e);
        if (out.size() == n) {
            break;
        }
    }
    return out;
}

auto ScoreCatalog::pareto(Criterion criterion) const -> std::vector<Entry const*>
{
    if (criterion == Criterion::Dl) {
        require_dl();
    }
    std::vector<Entry const*> out;
    std::optional<double> best;
    for (auto const& bucket : buckets_) {
        auto const& keys = criterion == Criterion::Fitness ? bucket.by_fitness : bucket.by_dl;
        if (keys.empty()) {
            continue;
        }
        // both keys are "smaller is better"
        auto const& k = *keys.begin();
        if (!best || std::get<0>(k) < *best) {
            best = std::get<0>(k);
            out.push_back(&entries_.at(std::get<2>(k)));
        }
    }
    return out;
}

void ScoreCatalog::clear()
{
    entries_.clear();
    by_fitness_.clear();
    by_dl_.clear();
    buckets_.clear();
}

} // namespace egsr::catalog
