// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_EXPR_PARSER_HPP
#define EGSR_EXPR_PARSER_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "egsr/expr/expr.hpp"

namespace egsr::expr {

// Raised on malformed input; `position` is the 0-based character offset of
// the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, std::string const& message);

    [[nodiscard]] auto position() const noexcept -> std::size_t { return position_; }
    [[nodiscard]] auto detail() const noexcept -> std::string const& { return detail_; }

private:
    std::size_t position_;
    std::string detail_;
};

// Prefix naming a family of terminals, e.g. "x" (0-based) or "X" (1-based).
struct IndexedName {
    std::string prefix;
    std::uint32_t base { 0 };
};

// A named function of the dialect and how it maps onto the core alphabet.
struct FunctionSpec {
    int arity { 1 };
    std::function<Expr(std::vector<Expr>)> build;
};

// Token-level description of an import grammar. All dialects share the infix
// skeleton (precedence, parentheses, unary minus); they differ in how
// terminals are named and which function names are understood.
struct Dialect {
    std::string name;
    std::vector<std::string> extensions;
    std::vector<IndexedName> variables;
    std::vector<IndexedName> parameters;
    std::map<std::string, FunctionSpec, std::less<>> functions;
    // Whether exported expressions carry their coefficients as literals.
    bool inline_literals { false };
    std::string summary;
};

struct ParseOptions {
    // Each numeric literal becomes a fresh parameter, numbered in encounter
    // order after any explicitly named parameter.
    bool extract_literals { false };
    // Accept v<k> pattern variables.
    bool allow_pattern_vars { false };
};

struct ParsedExpr {
    Expr expr;
    // Initial values of extracted literals, indexed by parameter number.
    // Explicit parameters get 1.0 when literals are extracted.
    std::vector<double> params;
};

auto parse_expression(std::string_view text, Dialect const& dialect, ParseOptions options = {}) -> ParsedExpr;
auto parse_expression(std::string_view text, ParseOptions options = {}) -> ParsedExpr;
auto parse_pattern(std::string_view text) -> Pattern;

class DialectRegistry {
public:
    void add(Dialect dialect);

    [[nodiscard]] auto by_name(std::string_view name) const -> Dialect const*;
    // Extension without the leading dot, case-insensitive.
    [[nodiscard]] auto by_extension(std::string_view ext) const -> Dialect const*;
    [[nodiscard]] auto names() const -> std::vector<std::string>;

    // Registry with every shipped dialect.
    static auto builtin() -> DialectRegistry const&;

private:
    std::vector<std::unique_ptr<Dialect>> dialects_;
};

auto generic_dialect() -> Dialect const&;

} // namespace egsr::expr

#endif
