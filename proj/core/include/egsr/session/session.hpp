// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_SESSION_SESSION_HPP
#define EGSR_SESSION_SESSION_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "egsr/catalog/catalog.hpp"
#include "egsr/egraph/egraph.hpp"
#include "egsr/eqsat/saturation.hpp"
#include "egsr/expr/parser.hpp"
#include "egsr/fitdata/dataset.hpp"
#include "egsr/fitdata/model.hpp"
#include "egsr/session/command.hpp"
#include "egsr/session/table.hpp"

namespace egsr::session {

// A command that parsed but cannot run (unknown id, missing dataset, ...).
class SessionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownIdError : public SessionError {
public:
    using SessionError::SessionError;
};

struct SessionConfig {
    std::optional<fitdata::Dataset> train;
    std::optional<fitdata::Dataset> test;
    fitdata::LossKind loss { fitdata::LossKind::Mse };
    // Compute the DL of every record as it is registered.
    bool calculate_dl { false };
    // Restarts for insert, and for optimize without an explicit count.
    int restarts { 3 };
    std::uint64_t seed { 0 };
    eqsat::Budget simplify_budget { 8, 20000 };
};

struct ImportReport {
    std::string dialect;
    std::size_t rows { 0 };
    std::size_t imported { 0 };
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

// One exploration state: the e-graph, the score catalog and the datasets.
// Not thread-safe; callers serialize access.
class Session {
public:
    explicit Session(SessionConfig config = {});
    Session(Session const&) = delete;
    auto operator=(Session const&) -> Session& = delete;
    Session(Session&&) = delete;
    auto operator=(Session&&) -> Session& = delete;
    ~Session() = default;

    // Parses and executes. Throws CommandError, SessionError or the error of
    // the module the command dispatches to.
    auto run(std::string_view text) -> Table;
    auto execute(Command const& command) -> Table;

    auto import_file(std::string const& path, bool parse_parameters) -> ImportReport;
    auto import_text(std::string_view text, expr::Dialect const& dialect, bool parse_parameters) -> ImportReport;

    void save(std::string const& path) const;
    void load(std::string const& path);

    // Fills in the DL of every record that has none; returns how many were set.
    auto calculate_all_dl() -> std::size_t;

    // Whether `id` names a registered expression.
    [[nodiscard]] auto known(std::uint32_t id) const -> bool;

    [[nodiscard]] auto graph() const noexcept -> egraph::EGraph const& { return graph_; }
    [[nodiscard]] auto catalog() const noexcept -> catalog::ScoreCatalog const& { return catalog_; }
    [[nodiscard]] auto config() const noexcept -> SessionConfig const& { return config_; }

    static auto row_columns() -> std::vector<std::string>;
    static auto row_of(catalog::Entry const& e) -> std::vector<Cell>;

private:
    auto top(TopCmd const& c) -> Table;
    auto report(std::uint32_t id) -> Table;
    auto subtrees(std::uint32_t id) -> Table;
    auto optimize(OptimizeCmd const& c) -> Table;
    auto insert(InsertCmd const& c) -> Table;
    auto pareto(ParetoCmd const& c) -> Table;
    auto count_pattern(CountPatternCmd const& c) -> Table;
    auto distribution(DistributionCmd const& c) -> Table;
    auto import_cmd(ImportCmd const& c) -> Table;
    auto simplify(std::uint32_t id) -> Table;

    auto entry(std::uint32_t id) const -> catalog::Entry const&;
    auto train() const -> fitdata::Dataset const&;
    auto next_seed() -> std::uint64_t;
    auto make_record(expr::Expr const& e, std::vector<double> params, double fitness) const -> fitdata::FitRecord;
    auto try_dl(expr::Expr const& e, std::vector<double> const& params) const -> std::optional<double>;
    void attach();

    SessionConfig config_;
    egraph::EGraph graph_;
    catalog::ScoreCatalog catalog_;
    std::uint64_t fit_counter_ { 0 };
    std::set<std::string> dialects_;
};

// Parameters renumbered 0, 1, ... by first appearance; shared indices stay
// shared. Returns the old index of each new one.
auto compact_parameters(expr::Expr& e) -> std::vector<std::uint32_t>;

// Distinct proper subtrees in breadth-first order with compacted parameters;
// a leaf yields itself.
auto distinct_subtrees(expr::Expr const& e) -> std::vector<expr::Expr>;

} // namespace egsr::session

#endif
