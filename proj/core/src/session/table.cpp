// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/session/table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

namespace egsr::session {

namespace {

    auto number(double v) -> std::string
    {
        if (std::isnan(v)) {
            return "nan";
        }
        if (std::isinf(v)) {
            return v > 0 ? "inf" : "-inf";
        }
        auto a = std::abs(v);
        if (a != 0.0 && (a < 1e-3 || a >= 1e12)) {
            return fmt::format("{:.4e}", v);
        }
        return fmt::format("{:.4f}", v);
    }

    struct Formatter {
        auto operator()(std::monostate) const -> std::string { return "--"; }
        auto operator()(std::int64_t v) const -> std::string { return std::to_string(v); }
        auto operator()(double v) const -> std::string { return number(v); }
        auto operator()(std::string const& v) const -> std::string { return v; }
        auto operator()(std::vector<double> const& v) const -> std::string
        {
            std::string out = "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) {
                    out += ", ";
                }
                out += number(v[i]);
            }
            return out + "]";
        }
    };

    auto numeric(Cell const& c) -> bool
    {
        return std::holds_alternative<std::int64_t>(c) || std::holds_alternative<double>(c);
    }

} // namespace

auto format_cell(Cell const& c) -> std::string { return std::visit(Formatter {}, c); }

auto format_table(Table const& t) -> std::string
{
    std::string out;
    if (t.vertical) {
        std::size_t w = 0;
        for (auto const& c : t.columns) {
            w = std::max(w, c.size());
        }
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (r > 0) {
                out += '\n';
            }
            for (std::size_t c = 0; c < t.columns.size(); ++c) {
                out += fmt::format("{:<{}}  {}\n", t.columns[c], w, format_cell(t.rows[r][c]));
            }
        }
    } else if (!t.columns.empty()) {
        std::vector<std::vector<std::string>> text(t.rows.size());
        std::vector<std::size_t> width(t.columns.size());
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            width[c] = t.columns[c].size();
        }
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            for (std::size_t c = 0; c < t.columns.size(); ++c) {
                text[r].push_back(format_cell(t.rows[r][c]));
                width[c] = std::max(width[c], text[r].back().size());
            }
        }
        auto line = [&](auto const& cells, auto right) {
            std::string s;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c > 0) {
                    s += "  ";
                }
                s += right(c) ? fmt::format("{:>{}}", cells[c], width[c]) : fmt::format("{:<{}}", cells[c], width[c]);
            }
            while (!s.empty() && s.back() == ' ') {
                s.pop_back();
            }
            return s + '\n';
        };
        auto header_right = [&](std::size_t c) { return !t.rows.empty() && numeric(t.rows[0][c]); };
        out += line(t.columns, header_right);
        std::string rule;
        for (std::size_t c = 0; c < width.size(); ++c) {
            rule += (c > 0 ? "  " : "") + std::string(width[c], '-');
        }
        out += rule + '\n';
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            out += line(text[r], [&](std::size_t c) { return numeric(t.rows[r][c]); });
        }
    }
    for (auto const& m : t.messages) {
        out += m + '\n';
    }
    return out;
}

auto column_key(std::string const& column) -> std::string
{
    std::string out;
    for (char ch : column) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            out += static_cast<char>(std::tolower(c));
        } else if (!out.empty() && out.back() != '_') {
            out += '_';
        }
    }
    while (!out.empty() && out.back() == '_') {
        out.pop_back();
    }
    return out;
}

} // namespace egsr::session
