// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_SESSION_TABLE_HPP
#define EGSR_SESSION_TABLE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace egsr::session {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string, std::vector<double>>;

// Result of one command: a table, possibly empty, plus free-form messages.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    // Render one "name: value" line per column instead of a grid.
    bool vertical { false };
    std::vector<std::string> messages;
};

auto format_cell(Cell const& c) -> std::string;

// Aligned text layout; messages follow the table.
auto format_table(Table const& t) -> std::string;

// Lower-case key for a column title, spaces and punctuation as '_'.
auto column_key(std::string const& column) -> std::string;

} // namespace egsr::session

#endif
