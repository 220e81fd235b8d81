// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/session/session.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "egsr/blocks/blocks.hpp"
#include "egsr/session/snapshot.hpp"

namespace egsr::session {

using catalog::Entry;
using egraph::EClassId;
using expr::Expr;

namespace {

    auto splitmix64(std::uint64_t x) -> std::uint64_t
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31U);
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

    auto unquote(std::string_view s) -> std::string_view
    {
        s = trim(s);
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
            s = s.substr(1, s.size() - 2);
        }
        return s;
    }

    auto to_double(std::string_view s) -> std::optional<double>
    {
        s = trim(s);
        if (s.starts_with('+')) {
            s.remove_prefix(1);
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc {} || ptr != s.data() + s.size()) {
            return std::nullopt;
        }
        return v;
    }

    // Splits an import row into expression, parameters and fitness. The
    // expression may contain commas (function arguments) unless quoted, so
    // the last two separators outside quotes delimit the other fields.
    auto split_row(std::string_view line) -> std::optional<std::array<std::string_view, 3>>
    {
        std::vector<std::size_t> commas;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') {
                quoted = !quoted;
            } else if (line[i] == ',' && !quoted) {
                commas.push_back(i);
            }
        }
        if (commas.size() < 2) {
            return std::nullopt;
        }
        auto b = commas[commas.size() - 2];
        auto c = commas.back();
        return std::array { unquote(line.substr(0, b)), unquote(line.substr(b + 1, c - b - 1)), unquote(line.substr(c + 1)) };
    }

    auto metric_cells(fitdata::Metrics const& m, std::optional<double> dl) -> std::vector<Cell>
    {
        return { m.mse, m.r2 ? Cell { *m.r2 } : Cell {}, m.nll, dl ? Cell { *dl } : Cell {} };
    }

} // namespace

auto compact_parameters(Expr& e) -> std::vector<std::uint32_t>
{
    std::map<std::uint32_t, std::uint32_t> renamed;
    std::vector<std::uint32_t> old;
    auto walk = [&](auto&& self, Expr& n) -> void {
        if (n.op == expr::Op::Param) {
            auto [it, inserted] = renamed.try_emplace(n.index, static_cast<std::uint32_t>(old.size()));
            if (inserted) {
                old.push_back(n.index);
            }
            n.index = it->second;
        }
        for (auto& c : n.children) {
            self(self, c);
        }
    };
    walk(walk, e);
    return old;
}

auto distinct_subtrees(Expr const& e) -> std::vector<Expr>
{
    if (e.is_leaf()) {
        Expr copy = e;
        compact_parameters(copy);
        return { copy };
    }
    std::vector<Expr> out;
    std::set<std::string> seen;
    std::deque<Expr const*> queue;
    for (auto const& c : e.children) {
        queue.push_back(&c);
    }
    while (!queue.empty()) {
        auto const* n = queue.front();
        queue.pop_front();
        Expr copy = *n;
        compact_parameters(copy);
        if (seen.insert(expr::render(copy)).second) {
            out.push_back(std::move(copy));
        }
        for (auto const& c : n->children) {
            queue.push_back(&c);
        }
    }
    return out;
}

Session::Session(SessionConfig config)
    : config_(std::move(config))
{
    if (config_.train && config_.test) {
        fitdata::check_compatible(*config_.train, *config_.test);
    }
    attach();
}

void Session::attach()
{
    graph_.on_merge([this](EClassId survivor, EClassId absorbed) { catalog_.merge(survivor, absorbed); });
}

auto Session::row_columns() -> std::vector<std::string> { return { "Id", "Expression", "Fitness", "Parameters", "Size", "DL" }; }

auto Session::row_of(Entry const& e) -> std::vector<Cell>
{
    auto const& r = e.record;
    return { static_cast<std::int64_t>(e.id.value), expr::render(e.expr), r.fitness, r.params, static_cast<std::int64_t>(r.size),
        r.dl ? Cell { *r.dl } : Cell {} };
}

auto Session::run(std::string_view text) -> Table { return execute(parse_command(text)); }

auto Session::execute(Command const& command) -> Table
{
    return std::visit(
        [this](auto const& c) -> Table {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, TopCmd>) {
                return top(c);
            } else if constexpr (std::is_same_v<T, ReportCmd>) {
                return report(c.id);
            } else if constexpr (std::is_same_v<T, SubtreesCmd>) {
                return subtrees(c.id);
            } else if constexpr (std::is_same_v<T, OptimizeCmd>) {
                return optimize(c);
            } else if constexpr (std::is_same_v<T, InsertCmd>) {
                return insert(c);
            } else if constexpr (std::is_same_v<T, ParetoCmd>) {
                return pareto(c);
            } else if constexpr (std::is_same_v<T, CountPatternCmd>) {
                return count_pattern(c);
            } else if constexpr (std::is_same_v<T, DistributionCmd>) {
                return distribution(c);
            } else if constexpr (std::is_same_v<T, SaveCmd>) {
                save(c.path);
                return Table { {}, {}, false, { fmt::format("saved {} expression(s) to {}", catalog_.size(), c.path) } };
            } else if constexpr (std::is_same_v<T, LoadCmd>) {
                load(c.path);
                return Table { {}, {}, false, { fmt::format("loaded {} expression(s) from {}", catalog_.size(), c.path) } };
            } else if constexpr (std::is_same_v<T, ImportCmd>) {
                return import_cmd(c);
            } else {
                return simplify(c.id);
            }
        },
        command);
}

auto Session::entry(std::uint32_t id) const -> Entry const&
{
    EClassId cid { id };
    if (graph_.contains(cid)) {
        cid = graph_.find(cid);
    }
    auto const* e = catalog_.find(cid);
    if (e == nullptr) {
        throw UnknownIdError(fmt::format("unknown id {}", id));
    }
    return *e;
}

auto Session::known(std::uint32_t id) const -> bool
{
    EClassId cid { id };
    return graph_.contains(cid) && catalog_.find(graph_.find(cid)) != nullptr;
}

auto Session::train() const -> fitdata::Dataset const&
{
    if (!config_.train) {
        throw SessionError("no dataset loaded; start with --dataset");
    }
    return *config_.train;
}

auto Session::next_seed() -> std::uint64_t { return splitmix64(config_.seed ^ splitmix64(fit_counter_++)); }

auto Session::try_dl(Expr const& e, std::vector<double> const& params) const -> std::optional<double>
{
    if (!config_.train) {
        return std::nullopt;
    }
    try {
        auto dl = fitdata::description_length(e, params, *config_.train);
        return std::isfinite(dl) ? std::optional<double>(dl) : std::nullopt;
    } catch (fitdata::DataError const&) {
        return std::nullopt;
    }
}

auto Session::make_record(Expr const& e, std::vector<double> params, double fitness) const -> fitdata::FitRecord
{
    fitdata::FitRecord r;
    r.params = std::move(params);
    r.fitness = fitness;
    r.size = expr::size_of(e);
    r.n_params = expr::parameter_count(e);
    r.loss = config_.loss;
    if (config_.calculate_dl) {
        r.dl = try_dl(e, r.params);
    }
    return r;
}

auto Session::top(TopCmd const& c) -> Table
{
    Table t { row_columns(), {}, false, {} };
    for (auto const* e : catalog_.top(graph_, c.n, c.filter, c.criterion, c.constraint)) {
        t.rows.push_back(row_of(*e));
    }
    return t;
}

auto Session::pareto(ParetoCmd const& c) -> Table
{
    Table t { row_columns(), {}, false, {} };
    for (auto const* e : catalog_.pareto(c.criterion)) {
        t.rows.push_back(row_of(*e));
    }
    return t;
}

auto Session::report(std::uint32_t id) -> Table
{
    auto const& e = entry(id);
    auto const& data = train();
    auto const& params = e.record.params;

    auto train_metrics = fitdata::metrics(e.expr, params, data);
    auto train_dl = try_dl(e.expr, params);
    if (train_dl && !e.record.dl) {
        catalog_.set_dl(e.id, *train_dl);
    }
    auto const& stored = entry(id);

    Table t;
    t.vertical = true;
    t.columns = row_columns();
    for (auto name : { "MSE (train)", "R2 (train)", "NLL (train)", "DL (train)" }) {
        t.columns.emplace_back(name);
    }
    auto row = row_of(stored);
    for (auto& c : metric_cells(train_metrics, train_dl)) {
        row.push_back(std::move(c));
    }
    if (config_.test) {
        for (auto name : { "MSE (test)", "R2 (test)", "NLL (test)", "DL (test)" }) {
            t.columns.emplace_back(name);
        }
        auto test_metrics = fitdata::metrics(e.expr, params, *config_.test);
        std::optional<double> test_dl;
        try {
            auto v = fitdata::description_length(e.expr, params, *config_.test);
            test_dl = std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
        } catch (fitdata::DataError const&) {
        }
        for (auto& c : metric_cells(test_metrics, test_dl)) {
            row.push_back(std::move(c));
        }
    }
    t.rows.push_back(std::move(row));
    return t;
}

auto Session::subtrees(std::uint32_t id) -> Table
{
    auto root = entry(id).expr;
    Table t { row_columns(), {}, false, {} };
    for (auto const& s : distinct_subtrees(root)) {
        auto sid = graph_.find(graph_.add_expr(s));
        if (auto const* known = catalog_.find(sid)) {
            t.rows.push_back(row_of(*known));
            continue;
        }
        std::vector<Cell> row { static_cast<std::int64_t>(sid.value), expr::render(s), Cell {}, Cell {},
            static_cast<std::int64_t>(expr::size_of(s)), Cell {} };
        if (config_.train) {
            try {
                auto fit = fitdata::fit_params(s, *config_.train, { config_.loss, 1, next_seed(), 200, {} });
                catalog_.add(sid, s, make_record(s, std::move(fit.params), fit.fitness));
                row = row_of(*catalog_.find(sid));
            } catch (std::runtime_error const& err) {
                t.messages.push_back(fmt::format("id {}: {}", sid.value, err.what()));
            }
        }
        t.rows.push_back(std::move(row));
    }
    graph_.rebuild();
    return t;
}

auto Session::insert(InsertCmd const& c) -> Table
{
    auto id = graph_.find(graph_.add_expr(c.expr));
    graph_.rebuild();
    id = graph_.find(id);
    Table t { row_columns(), {}, false, {} };
    if (auto const* known = catalog_.find(id)) {
        t.rows.push_back(row_of(*known));
        t.messages.push_back(fmt::format("expression already stored as id {}", id.value));
        return t;
    }
    auto const& data = train();
    try {
        auto fit = fitdata::fit_params(c.expr, data, { config_.loss, config_.restarts, next_seed(), 200, {} });
        catalog_.add(id, c.expr, make_record(c.expr, std::move(fit.params), fit.fitness));
    } catch (std::runtime_error const& err) {
        throw SessionError(fmt::format("fit failed for id {} (stored without a fitness): {}", id.value, err.what()));
    }
    t.rows.push_back(row_of(*catalog_.find(id)));
    return t;
}

auto Session::optimize(OptimizeCmd const& c) -> Table
{
    auto const& e = entry(c.id);
    auto const& data = train();
    auto restarts = c.restarts.value_or(config_.restarts);
    auto fit = fitdata::fit_params(e.expr, data, { config_.loss, restarts, next_seed(), 200, {} });
    Table t { row_columns(), {}, false, {} };
    if (fit.fitness > e.record.fitness) {
        auto before = e.record.fitness;
        auto rec = make_record(e.expr, std::move(fit.params), fit.fitness);
        if (e.record.dl && !rec.dl) {
            rec.dl = try_dl(e.expr, rec.params);
        }
        auto id = e.id;
        catalog_.replace(id, std::move(rec));
        t.messages.push_back(fmt::format("fitness improved from {} to {}", format_cell(before), format_cell(fit.fitness)));
    } else {
        t.messages.push_back(fmt::format("no improvement over {} (best restart reached {})", format_cell(e.record.fitness),
            format_cell(fit.fitness)));
    }
    t.rows.push_back(row_of(entry(c.id)));
    return t;
}

auto Session::count_pattern(CountPatternCmd const& c) -> Table
{
    Table t { { "Pattern", "Count" }, {}, false, {} };
    t.rows.push_back({ expr::render(c.pattern), static_cast<std::int64_t>(blocks::count_pattern(graph_, c.pattern)) });
    return t;
}

auto Session::distribution(DistributionCmd const& c) -> Table
{
    Table t { { "Pattern", "Count", "Avg. Fitness" }, {}, false, {} };
    for (auto& r : blocks::distribution(graph_, catalog_, c.query)) {
        t.rows.push_back({ std::move(r.pattern), static_cast<std::int64_t>(r.count), r.avg_fitness });
    }
    return t;
}

auto Session::simplify(std::uint32_t id) -> Table
{
    EClassId cid { id };
    if (!graph_.contains(cid)) {
        throw UnknownIdError(fmt::format("unknown id {}", id));
    }
    cid = graph_.find(cid);
    auto const* e = catalog_.find(cid);
    auto original = e != nullptr ? e->expr : graph_.extract_best(cid);
    auto simpler = eqsat::simplify(original, eqsat::default_rules(), config_.simplify_budget);
    Table t { { "Id", "Expression", "Cost", "Simplified", "Simplified Cost" }, {}, false, {} };
    t.rows.push_back({ static_cast<std::int64_t>(cid.value), expr::render(original), expr::cost_of(original), expr::render(simpler),
        expr::cost_of(simpler) });
    return t;
}

auto Session::import_cmd(ImportCmd const& c) -> Table
{
    auto r = import_file(c.path, c.parse_parameters);
    Table t;
    t.messages.push_back(fmt::format("imported {} of {} row(s) from {} as {}", r.imported, r.rows, c.path, r.dialect));
    for (auto& w : r.warnings) {
        t.messages.push_back("warning: " + w);
    }
    for (auto& e : r.errors) {
        t.messages.push_back("error: " + e);
    }
    return t;
}

auto Session::import_file(std::string const& path, bool parse_parameters) -> ImportReport
{
    std::ifstream in(path);
    if (!in) {
        throw SessionError(fmt::format("cannot open '{}'", path));
    }
    std::stringstream buf;
    buf << in.rdbuf();

    auto ext = std::filesystem::path(path).extension().string();
    auto const* dialect = expr::DialectRegistry::builtin().by_extension(ext);
    std::vector<std::string> warnings;
    if (dialect == nullptr) {
        dialect = &expr::generic_dialect();
        warnings.push_back(fmt::format("unknown extension '{}', reading {} with the generic dialect", ext, path));
    }
    auto report = import_text(buf.str(), *dialect, parse_parameters);
    warnings.insert(warnings.end(), report.warnings.begin(), report.warnings.end());
    report.warnings = std::move(warnings);
    return report;
}

auto Session::import_text(std::string_view text, expr::Dialect const& dialect, bool parse_parameters) -> ImportReport
{
    ImportReport report;
    report.dialect = dialect.name;
    std::size_t lineno = 0;
    std::size_t start = 0;
    bool first = true;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = trim(text.substr(start, end - start));
        start = end + 1;
        ++lineno;
        if (line.empty()) {
            continue;
        }
        auto fields = split_row(line);
        bool header = first;
        first = false;
        if (!fields) {
            ++report.rows;
            report.errors.push_back(fmt::format("line {}: expected 3 comma-separated fields", lineno));
            continue;
        }
        auto [expr_text, params_text, fitness_text] = *fields;
        auto fitness = to_double(fitness_text);
        if (header && !fitness) {
            continue; // column titles
        }
        ++report.rows;
        try {
            if (!fitness || !std::isfinite(*fitness)) {
                throw SessionError(fmt::format("fitness '{}' is not a finite number", fitness_text));
            }
            expr::ParseOptions opts;
            opts.extract_literals = parse_parameters;
            auto parsed = expr::parse_expression(expr_text, dialect, opts);
            auto span = expr::parameter_span(parsed.expr);
            std::vector<double> params;
            if (parse_parameters) {
                params = std::move(parsed.params);
                params.resize(span, 1.0);
            } else {
                auto list = trim(params_text);
                while (!list.empty()) {
                    auto semi = list.find(';');
                    auto item = list.substr(0, semi);
                    auto v = to_double(item);
                    if (!v) {
                        throw SessionError(fmt::format("parameter '{}' is not a number", trim(item)));
                    }
                    params.push_back(*v);
                    list = semi == std::string_view::npos ? std::string_view {} : list.substr(semi + 1);
                }
                if (params.size() != span) {
                    throw SessionError(fmt::format("expression uses {} parameter(s) but {} value(s) were given", span, params.size()));
                }
            }
            auto id = graph_.find(graph_.add_expr(parsed.expr));
            catalog_.add(id, parsed.expr, make_record(parsed.expr, std::move(params), *fitness));
            ++report.imported;
        } catch (expr::ParseError const& e) {
            report.errors.push_back(fmt::format("line {}, column {}: {}", lineno, e.position() + 1, e.detail()));
        } catch (std::exception const& e) {
            report.errors.push_back(fmt::format("line {}: {}", lineno, e.what()));
        }
    }
    graph_.rebuild();
    if (report.imported > 0) {
        dialects_.insert(report.dialect);
    }
    if (dialects_.size() > 1) {
        std::string names;
        for (auto const& d : dialects_) {
            names += (names.empty() ? "" : ", ") + d;
        }
        report.warnings.push_back(
            fmt::format("expressions come from several tools ({}); their fitness values may use different loss conventions", names));
    }
    return report;
}

void Session::save(std::string const& path) const
{
    SnapshotMeta meta { fit_counter_, { dialects_.begin(), dialects_.end() } };
    save_snapshot(path, graph_, catalog_, meta);
}

void Session::load(std::string const& path)
{
    auto snap = load_snapshot(path);
    if (config_.train) {
        for (auto const* e : snap.catalog.entries()) {
            if (expr::max_variable_index(e->expr) >= config_.train->columns()) {
                throw SessionError(fmt::format("snapshot expression {} uses more variables than the dataset has", e->id.value));
            }
        }
    }
    graph_ = std::move(snap.graph);
    catalog_ = std::move(snap.catalog);
    fit_counter_ = snap.meta.fit_counter;
    dialects_ = { snap.meta.dialects.begin(), snap.meta.dialects.end() };
    attach();
}

auto Session::calculate_all_dl() -> std::size_t
{
    std::size_t n = 0;
    for (auto const* e : catalog_.entries()) {
        if (e->record.dl) {
            continue;
        }
        if (auto dl = try_dl(e->expr, e->record.params)) {
            catalog_.set_dl(e->id, *dl);
            ++n;
        }
    }
    return n;
}

} // namespace egsr::session
