// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_SESSION_COMMAND_HPP
#define EGSR_SESSION_COMMAND_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "egsr/blocks/blocks.hpp"
#include "egsr/catalog/catalog.hpp"
#include "egsr/expr/expr.hpp"

namespace egsr::session {

// A malformed command. `position` is a 0-based offset into the command text.
class CommandError : public std::runtime_error {
public:
    CommandError(std::size_t position, std::string const& message);

    [[nodiscard]] auto position() const noexcept -> std::size_t { return position_; }
    [[nodiscard]] auto detail() const noexcept -> std::string const& { return detail_; }

private:
    std::size_t position_;
    std::string detail_;
};

struct TopCmd {
    std::size_t n { 0 };
    catalog::Filter filter;
    catalog::Criterion criterion { catalog::Criterion::Fitness };
    std::optional<catalog::PatternConstraint> constraint;

    friend auto operator==(TopCmd const&, TopCmd const&) -> bool = default;
};

struct ReportCmd {
    std::uint32_t id { 0 };
    friend auto operator==(ReportCmd const&, ReportCmd const&) -> bool = default;
};

struct SubtreesCmd {
    std::uint32_t id { 0 };
    friend auto operator==(SubtreesCmd const&, SubtreesCmd const&) -> bool = default;
};

struct OptimizeCmd {
    std::uint32_t id { 0 };
    std::optional<int> restarts;
    friend auto operator==(OptimizeCmd const&, OptimizeCmd const&) -> bool = default;
};

struct InsertCmd {
    expr::Expr expr;
    std::string text;
    friend auto operator==(InsertCmd const&, InsertCmd const&) -> bool = default;
};

struct ParetoCmd {
    catalog::Criterion criterion { catalog::Criterion::Fitness };
    friend auto operator==(ParetoCmd const&, ParetoCmd const&) -> bool = default;
};

struct CountPatternCmd {
    expr::Pattern pattern;
    friend auto operator==(CountPatternCmd const&, CountPatternCmd const&) -> bool = default;
};

struct DistributionCmd {
    blocks::DistributionQuery query;
    friend auto operator==(DistributionCmd const&, DistributionCmd const&) -> bool = default;
};

struct SaveCmd {
    std::string path;
    friend auto operator==(SaveCmd const&, SaveCmd const&) -> bool = default;
};

struct LoadCmd {
    std::string path;
    friend auto operator==(LoadCmd const&, LoadCmd const&) -> bool = default;
};

struct ImportCmd {
    std::string path;
    bool parse_parameters { false };
    friend auto operator==(ImportCmd const&, ImportCmd const&) -> bool = default;
};

struct SimplifyCmd {
    std::uint32_t id { 0 };
    friend auto operator==(SimplifyCmd const&, SimplifyCmd const&) -> bool = default;
};

using Command = std::variant<TopCmd, ReportCmd, SubtreesCmd, OptimizeCmd, InsertCmd, ParetoCmd, CountPatternCmd,
    DistributionCmd, SaveCmd, LoadCmd, ImportCmd, SimplifyCmd>;

// Throws CommandError.
auto parse_command(std::string_view text) -> Command;

// Commands that change the e-graph or the catalog.
auto is_mutating(Command const& c) -> bool;

auto command_name(Command const& c) -> std::string_view;

} // namespace egsr::session

#endif
