// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/fitdata/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

namespace egsr::fitdata {

namespace {

    auto split(std::string_view line) -> std::vector<std::string_view>
    {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            auto b = field.find_first_not_of(" \t\r\"");
            auto e = field.find_last_not_of(" \t\r\"");
            out.push_back(b == std::string_view::npos ? std::string_view {} : field.substr(b, e - b + 1));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        return out;
    }

    auto to_double(std::string_view s, std::size_t line, std::size_t col) -> double
    {
        if (s.starts_with('+')) {
            s.remove_prefix(1);
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc {} || ptr != s.data() + s.size()) {
            throw DataError(fmt::format("line {}, column {}: '{}' is not a number", line, col + 1, s));
        }
        return v;
    }

} // namespace

auto parse_csv(std::string const& text, std::optional<std::string> const& target) -> Dataset
{
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(in, header_line)) {
        ++lineno;
        if (header_line.find_first_not_of(" \t\r") != std::string::npos) {
            header = split(header_line);
            break;
        }
    }
    if (header.size() < 1) {
        throw DataError("dataset has no header row");
    }
    std::size_t target_col = header.size() - 1;
    if (target) {
        auto it = std::find(header.begin(), header.end(), *target);
        if (it == header.end()) {
            throw DataError(fmt::format("target column '{}' not found", *target));
        }
        target_col = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto fields = split(line);
        if (fields.size() != header.size()) {
            throw DataError(fmt::format("line {}: expected {} fields, found {}", lineno, header.size(), fields.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            row[c] = to_double(fields[c], lineno, c);
        }
        rows.push_back(std::move(row));
    }

    Dataset d;
    auto const n = static_cast<Eigen::Index>(rows.size());
    auto const p = static_cast<Eigen::Index>(header.size() - 1);
    d.predictors.resize(n, p);
    d.target.resize(n);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == target_col) {
            d.target_name = std::string(header[c]);
        } else {
            d.predictor_names.emplace_back(header[c]);
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        Eigen::Index k = 0;
        for (std::size_t c = 0; c < header.size(); ++c) {
            auto v = rows[static_cast<std::size_t>(r)][c];
            if (c == target_col) {
                d.target(r) = v;
            } else {
                d.predictors(r, k++) = v;
            }
        }
    }
    return d;
}

auto load_csv(std::string const& path, std::optional<std::string> const& target) -> Dataset
{
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("cannot open dataset '{}'", path));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), target);
}

void check_compatible(Dataset const& train, Dataset const& test)
{
    if (train.columns() != test.columns()) {
        throw DataError(fmt::format("test partition has {} predictor columns, training has {}", test.columns(), train.columns()));
    }
}

} // namespace egsr::fitdata
