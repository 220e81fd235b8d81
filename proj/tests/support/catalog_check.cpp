// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "catalog_check.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "egsr/expr/expr.hpp"
#include "oracles.hpp"

namespace egsr::oracle {

using catalog::Criterion;
using egraph::EClassId;

namespace {

struct Row {
    EClassId id;
    double fitness;
    double dl;
    std::size_t size;
    std::size_t n_params;
    std::int64_t cost;
};

auto rows(CatalogFixture const& f) -> std::vector<Row>
{
    std::vector<Row> out;
    for (auto const* e : f.cat.entries()) {
        out.push_back({ e->id, e->record.fitness, e->record.dl.value_or(0.0), e->record.size, e->record.n_params,
            weighted_cost(e->expr) });
    }
    return out;
}

auto score(Row const& r, Criterion c) -> double { return c == Criterion::Fitness ? -r.fitness : r.dl; }

auto better(Row const& a, Row const& b, Criterion c) -> bool
{
    if (score(a, c) != score(b, c)) {
        return score(a, c) < score(b, c);
    }
    if (a.size != b.size) {
        return a.size < b.size;
    }
    return a.id < b.id;
}

auto ids(std::vector<catalog::Entry const*> const& v) -> std::vector<EClassId>
{
    std::vector<EClassId> out;
    for (auto const* e : v) {
        out.push_back(e->id);
    }
    return out;
}

auto show(std::vector<EClassId> const& v) -> std::string
{
    std::string s;
    for (auto id : v) {
        s += fmt::format("{} ", id.value);
    }
    return s;
}

} // namespace

auto random_catalog(std::uint64_t seed, std::size_t n) -> CatalogFixture
{
    CatalogFixture f;
    Rng rng(seed);
    std::uniform_int_distribution<int> grid(0, 40);
    while (f.cat.size() < n) {
        auto e = random_expr(rng, 12);
        auto id = f.g.add_expr(e);
        if (f.cat.find(id) != nullptr) {
            continue;
        }
        fitdata::FitRecord r;
        r.fitness = -grid(rng) / 8.0;
        r.dl = grid(rng) * 0.25;
        r.size = expr::size_of(e);
        r.n_params = expr::parameter_count(e);
        f.cat.add(id, e, r);
    }
    return f;
}

auto reference_top(CatalogFixture const& f, std::size_t n, catalog::Filter const& filter, Criterion c)
    -> std::vector<EClassId>
{
    std::vector<Row> kept;
    for (auto const& r : rows(f)) {
        bool ok = true;
        for (auto const& a : filter.atoms) {
            std::int64_t v = a.field == catalog::Field::Size ? static_cast<std::int64_t>(r.size)
                : a.field == catalog::Field::Cost            ? r.cost
                                                             : static_cast<std::int64_t>(r.n_params);
            ok = ok && catalog::compare(v, a.cmp, a.bound);
        }
        if (ok) {
            kept.push_back(r);
        }
    }
    std::sort(kept.begin(), kept.end(), [c](Row const& a, Row const& b) { return better(a, b, c); });
    std::vector<EClassId> out;
    for (std::size_t i = 0; i < std::min(n, kept.size()); ++i) {
        out.push_back(kept[i].id);
    }
    return out;
}

auto reference_pareto(CatalogFixture const& f, Criterion c) -> std::vector<EClassId>
{
    auto all = rows(f);
    std::vector<Row> front;
    for (auto const& a : all) {
        bool dominated = false;
        for (auto const& b : all) {
            bool smaller = b.size < a.size && score(b, c) <= score(a, c);
            bool same_size = b.size == a.size && better(b, a, c);
            if (smaller || same_size) {
                dominated = true;
                break;
            }
        }
        if (!dominated) {
            front.push_back(a);
        }
    }
    std::sort(front.begin(), front.end(), [](Row const& a, Row const& b) { return a.size < b.size; });
    std::vector<EClassId> out;
    for (auto const& r : front) {
        out.push_back(r.id);
    }
    return out;
}

auto compare_catalog(std::uint64_t seed, std::size_t records, std::size_t queries) -> CatalogComparison
{
    CatalogComparison out;
    auto f = random_catalog(seed, records);
    Rng rng(seed ^ 0x5bd1e995U);
    std::uniform_int_distribution<int> field(0, 2);
    std::uniform_int_distribution<int> cmp(0, 4);
    std::uniform_int_distribution<int> atoms(0, 2);
    std::uniform_int_distribution<std::size_t> count(0, records + 5);
    auto check = [&](std::string const& what, std::vector<EClassId> const& got, std::vector<EClassId> const& want) {
        ++out.queries;
        if (got != want) {
            if (out.failures++ == 0) {
                out.first_failure = fmt::format("{}: got [{}] want [{}]", what, show(got), show(want));
            }
        }
    };
    for (std::size_t q = 0; q < queries; ++q) {
        catalog::Filter filter;
        for (int a = atoms(rng); a > 0; --a) {
            catalog::FilterAtom atom;
            atom.field = static_cast<catalog::Field>(field(rng));
            atom.cmp = static_cast<catalog::Comparison>(cmp(rng));
            atom.bound = std::uniform_int_distribution<std::int64_t>(0, atom.field == catalog::Field::Cost ? 25 : 12)(rng);
            filter.atoms.push_back(atom);
        }
        auto n = q % 4 == 0 ? count(rng) : std::uniform_int_distribution<std::size_t>(0, 20)(rng);
        for (auto c : { Criterion::Fitness, Criterion::Dl }) {
            check(fmt::format("top {} {} ({} atoms)", n, catalog::criterion_name(c), filter.atoms.size()),
                ids(f.cat.top(f.g, n, filter, c)), reference_top(f, n, filter, c));
        }
    }
    for (auto c : { Criterion::Fitness, Criterion::Dl }) {
        check(fmt::format("pareto {}", catalog::criterion_name(c)), ids(f.cat.pareto(c)), reference_pareto(f, c));
    }
    return out;
}

} // namespace egsr::oracle
