// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/expr/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace egsr::expr {

ParseError::ParseError(std::size_t position, std::string const& message)
    : std::runtime_error(fmt::format("parse error at position {}: {}", position, message))
    , position_(position)
    , detail_(message)
{
}

namespace {

    enum class Tok {
        Number,
        Ident,
        Plus,
        Minus,
        Star,
        Slash,
        Caret,
        PowAbs,
        LParen,
        RParen,
        Comma,
        End,
    };

    struct Token {
        Tok kind;
        std::size_t pos;
        std::string_view text;
        double number { 0.0 };
    };

    auto describe(Token const& t) -> std::string
    {
        if (t.kind == Tok::End) {
            return "end of input";
        }
        return fmt::format("'{}'", t.text);
    }

    auto tokenize(std::string_view s) -> std::vector<Token>
    {
        std::vector<Token> out;
        std::size_t i = 0;
        while (i < s.size()) {
            char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c)) != 0) {
                ++i;
                continue;
            }
            auto start = i;
            if ((std::isdigit(static_cast<unsigned char>(c)) != 0) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])) != 0)) {
                while (i < s.size() && ((std::isdigit(static_cast<unsigned char>(s[i])) != 0) || s[i] == '.')) {
                    ++i;
                }
                if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                    auto j = i + 1;
                    if (j < s.size() && (s[j] == '+' || s[j] == '-')) {
                        ++j;
                    }
                    if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])) != 0) {
                        i = j;
                        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) != 0) {
                            ++i;
                        }
                    }
                }
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + i, v);
                if (ec != std::errc {} || ptr != s.data() + i) {
                    throw ParseError(start, fmt::format("malformed number '{}'", s.substr(start, i - start)));
                }
                out.push_back({ Tok::Number, start, s.substr(start, i - start), v });
                continue;
            }
            if ((std::isalpha(static_cast<unsigned char>(c)) != 0) || c == '_') {
                while (i < s.size() && ((std::isalnum(static_cast<unsigned char>(s[i])) != 0) || s[i] == '_')) {
                    ++i;
                }
                out.push_back({ Tok::Ident, start, s.substr(start, i - start) });
                continue;
            }
            if (s.substr(i, 4) == "|**|") {
                out.push_back({ Tok::PowAbs, start, s.substr(i, 4) });
                i += 4;
                continue;
            }
            if (s.substr(i, 2) == "**") {
                out.push_back({ Tok::Caret, start, s.substr(i, 2) });
                i += 2;
                continue;
            }
            Tok kind {};
            switch (c) {
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '^': kind = Tok::Caret; break;
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            case ',': kind = Tok::Comma; break;
            default:
                throw ParseError(start, fmt::format("unexpected character '{}'", c));
            }
            out.push_back({ kind, start, s.substr(i, 1) });
            ++i;
        }
        out.push_back({ Tok::End, s.size(), {} });
        return out;
    }

    // Index of an identifier of the form <prefix>[_]<digits>, if it matches.
    auto match_indexed(std::string_view ident, std::vector<IndexedName> const& names) -> std::optional<std::pair<std::uint32_t, std::uint32_t>>
    {
        IndexedName const* best = nullptr;
        for (auto const& n : names) {
            if (ident.starts_with(n.prefix) && (best == nullptr || n.prefix.size() > best->prefix.size())) {
                auto rest = ident.substr(n.prefix.size());
                if (rest.starts_with('_')) {
                    rest.remove_prefix(1);
                }
                if (!rest.empty() && std::all_of(rest.begin(), rest.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; })) {
                    best = &n;
                }
            }
        }
        if (best == nullptr) {
            return std::nullopt;
        }
        auto rest = ident.substr(best->prefix.size());
        if (rest.starts_with('_')) {
            rest.remove_prefix(1);
        }
        std::uint32_t v = 0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
        if (ec != std::errc {} || ptr != rest.data() + rest.size()) {
            return std::nullopt;
        }
        return std::pair { v, best->base };
    }

    class Parser {
    public:
        Parser(std::string_view text, Dialect const& dialect, ParseOptions options)
            : tokens_(tokenize(text))
            , dialect_(dialect)
            , options_(options)
        {
            if (options_.extract_literals) {
                for (auto const& t : tokens_) {
                    if (t.kind != Tok::Ident) {
                        continue;
                    }
                    if (auto m = match_indexed(t.text, dialect_.parameters); m && m->first >= m->second) {
                        next_literal_ = std::max(next_literal_, m->first - m->second + 1);
                    }
                }
                params_.assign(next_literal_, 1.0);
            }
        }

        auto run() -> ParsedExpr
        {
            if (peek().kind == Tok::End) {
                throw ParseError(0, "empty expression");
            }
            auto e = additive();
            if (peek().kind != Tok::End) {
                throw ParseError(peek().pos, fmt::format("unexpected {}", describe(peek())));
            }
            return { std::move(e), std::move(params_) };
        }

    private:
        auto peek() const -> Token const& { return tokens_[cur_]; }
        auto take() -> Token const& { return tokens_[cur_++]; }

        void expect(Tok kind, std::string_view what)
        {
            if (peek().kind != kind) {
                throw ParseError(peek().pos, fmt::format("expected {} but found {}", what, describe(peek())));
            }
            ++cur_;
        }

        auto additive() -> Expr
        {
            auto lhs = multiplicative();
            while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
                auto op = take().kind == Tok::Plus ? Op::Add : Op::Sub;
                lhs = Expr::binary(op, std::move(lhs), multiplicative());
            }
            return lhs;
        }

        auto multiplicative() -> Expr
        {
            auto lhs = negation();
            while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
                auto op = take().kind == Tok::Star ? Op::Mul : Op::Div;
                lhs = Expr::binary(op, std::move(lhs), negation());
            }
            return lhs;
        }

        auto negation() -> Expr
        {
            if (peek().kind != Tok::Minus) {
                return power();
            }
            take();
            auto operand = negation();
            return negate(std::move(operand));
        }

        auto negate(Expr operand) -> Expr
        {
            if (operand.op == Op::Const) {
                operand.value = -operand.value;
                return operand;
            }
            if (operand.op == Op::Param && last_literal_ && *last_literal_ == operand.index) {
                params_[operand.index] = -params_[operand.index];
                return operand;
            }
            return Expr::binary(Op::Mul, Expr::constant(-1.0), std::move(operand));
        }

        auto power() -> Expr
        {
            auto base = primary();
            if (peek().kind != Tok::Caret && peek().kind != Tok::PowAbs) {
                return base;
            }
            auto op = take().kind == Tok::Caret ? Op::Pow : Op::PowAbs;
            return Expr::binary(op, std::move(base), exponent());
        }

        // Right operand of a power: right-associative, may carry a sign.
        auto exponent() -> Expr
        {
            if (peek().kind == Tok::Minus) {
                take();
                return negate(exponent());
            }
            return power();
        }

        auto primary() -> Expr
        {
            last_literal_.reset();
            auto const& t = peek();
            switch (t.kind) {
            case Tok::Number:
                take();
                return literal(t.number);
            case Tok::LParen: {
                take();
                auto e = additive();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident:
                return identifier();
            default:
                throw ParseError(t.pos, fmt::format("unexpected {}", describe(t)));
            }
        }

        auto literal(double v) -> Expr
        {
            if (!options_.extract_literals) {
                return Expr::constant(v);
            }
            auto idx = next_literal_++;
            params_.push_back(v);
            last_literal_ = idx;
            return Expr::param(idx);
        }

        auto identifier() -> Expr
        {
            auto const& t = take();
            if (peek().kind == Tok::LParen) {
                auto it = dialect_.functions.find(t.text);
                if (it == dialect_.functions.end()) {
                    throw ParseError(t.pos, fmt::format("unknown function '{}'", t.text));
                }
                take();
                std::vector<Expr> args;
                if (peek().kind != Tok::RParen) {
                    args.push_back(additive());
                    while (peek().kind == Tok::Comma) {
                        take();
                        args.push_back(additive());
                    }
                }
                expect(Tok::RParen, "')'");
                if (static_cast<int>(args.size()) != it->second.arity) {
                    throw ParseError(t.pos, fmt::format("function '{}' expects {} argument(s), got {}", t.text, it->second.arity, args.size()));
                }
                last_literal_.reset();
                return it->second.build(std::move(args));
            }
            if (options_.allow_pattern_vars) {
                if (auto m = match_indexed(t.text, { { "v", 0 } })) {
                    return Expr::pattern_var(m->first);
                }
            }
            if (auto m = match_indexed(t.text, dialect_.variables)) {
                if (m->first < m->second) {
                    throw ParseError(t.pos, fmt::format("variable index below {} in '{}'", m->second, t.text));
                }
                return Expr::var(m->first - m->second);
            }
            if (auto m = match_indexed(t.text, dialect_.parameters)) {
                if (m->first < m->second) {
                    throw ParseError(t.pos, fmt::format("parameter index below {} in '{}'", m->second, t.text));
                }
                return Expr::param(m->first - m->second);
            }
            if (dialect_.functions.contains(t.text)) {
                throw ParseError(t.pos, fmt::format("function '{}' requires an argument list", t.text));
            }
            throw ParseError(t.pos, fmt::format("unknown symbol '{}'", t.text));
        }

        std::vector<Token> tokens_;
        std::size_t cur_ { 0 };
        Dialect const& dialect_;
        ParseOptions options_;
        std::vector<double> params_;
        std::uint32_t next_literal_ { 0 };
        std::optional<std::uint32_t> last_literal_;
    };

    auto unary_fn(Op op) -> FunctionSpec
    {
        return { 1, [op](std::vector<Expr> a) { return Expr::unary(op, std::move(a[0])); } };
    }

    auto binary_fn(Op op) -> FunctionSpec
    {
        return { 2, [op](std::vector<Expr> a) { return Expr::binary(op, std::move(a[0]), std::move(a[1])); } };
    }

    auto power_fn(double k) -> FunctionSpec
    {
        return { 1, [k](std::vector<Expr> a) { return Expr::binary(Op::Pow, std::move(a[0]), Expr::constant(k)); } };
    }

    auto core_functions() -> std::map<std::string, FunctionSpec, std::less<>>
    {
        return {
            { "sin", unary_fn(Op::Sin) },
            { "cos", unary_fn(Op::Cos) },
            { "exp", unary_fn(Op::Exp) },
            { "log", unary_fn(Op::Log) },
            { "sqrt", unary_fn(Op::Sqrt) },
            { "abs", unary_fn(Op::Abs) },
            { "pow", binary_fn(Op::Pow) },
            { "powabs", binary_fn(Op::PowAbs) },
        };
    }

    auto make_generic() -> Dialect
    {
        Dialect d;
        d.name = "generic";
        d.extensions = { "csv" };
        d.variables = { { "x", 0 } };
        d.parameters = { { "t", 0 }, { "p", 0 }, { "theta", 0 } };
        d.functions = core_functions();
        d.summary = "infix with x<k> variables (0-based), t<k>/p<k> parameters, ^ ** |**| powers";
        return d;
    }

    auto make_operon() -> Dialect
    {
        Dialect d;
        d.name = "operon";
        d.extensions = { "operon" };
        d.variables = { { "X", 1 }, { "x", 0 } };
        d.parameters = { { "t", 0 }, { "p", 0 } };
        d.functions = core_functions();
        d.functions.emplace("logabs", unary_fn(Op::Log));
        d.functions.emplace("sqrtabs", unary_fn(Op::Sqrt));
        d.functions.emplace("square", power_fn(2.0));
        d.inline_literals = true;
        d.summary = "infix with inline coefficients, X<k> variables (1-based) or x<k> (0-based), logabs/sqrtabs/square";
        return d;
    }

    auto make_pysr() -> Dialect
    {
        Dialect d;
        d.name = "pysr";
        d.extensions = { "pysr" };
        d.variables = { { "x", 0 } };
        d.parameters = {};
        d.functions = core_functions();
        d.functions.emplace("square", power_fn(2.0));
        d.functions.emplace("cube", power_fn(3.0));
        d.functions.emplace("neg", FunctionSpec { 1, [](std::vector<Expr> a) { return Expr::binary(Op::Mul, Expr::constant(-1.0), std::move(a[0])); } });
        d.inline_literals = true;
        d.summary = "infix with inline coefficients, x<k> variables (0-based), square/cube/neg";
        return d;
    }

    // Tools whose exported grammar is not pinned down yet: they parse the
    // generic infix grammar and exist so the extension maps to a dialect.
    auto make_alias(std::string name, std::string ext, bool inline_literals) -> Dialect
    {
        auto d = make_generic();
        d.name = std::move(name);
        d.extensions = { std::move(ext) };
        d.variables = { { "x", 0 }, { "X", 0 } };
        d.inline_literals = inline_literals;
        d.summary = "generic infix grammar (tool-specific syntax is an extension point)";
        return d;
    }

    auto lower(std::string_view s) -> std::string
    {
        std::string out(s);
        std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    }

} // namespace

auto generic_dialect() -> Dialect const&
{
    static Dialect const d = make_generic();
    return d;
}

auto parse_expression(std::string_view text, Dialect const& dialect, ParseOptions options) -> ParsedExpr
{
    return Parser(text, dialect, options).run();
}

auto parse_expression(std::string_view text, ParseOptions options) -> ParsedExpr
{
    return parse_expression(text, generic_dialect(), options);
}

auto parse_pattern(std::string_view text) -> Pattern
{
    return parse_expression(text, generic_dialect(), { .extract_literals = false, .allow_pattern_vars = true }).expr;
}

void DialectRegistry::add(Dialect dialect)
{
    auto it = std::find_if(dialects_.begin(), dialects_.end(), [&](auto const& d) { return d->name == dialect.name; });
    if (it != dialects_.end()) {
        **it = std::move(dialect);
        return;
    }
    dialects_.push_back(std::make_unique<Dialect>(std::move(dialect)));
}

auto DialectRegistry::by_name(std::string_view name) const -> Dialect const*
{
    auto key = lower(name);
    for (auto const& d : dialects_) {
        if (d->name == key) {
            return d.get();
        }
    }
    return nullptr;
}

auto DialectRegistry::by_extension(std::string_view ext) const -> Dialect const*
{
    if (ext.starts_with('.')) {
        ext.remove_prefix(1);
    }
    auto key = lower(ext);
    for (auto const& d : dialects_) {
        if (std::find(d->extensions.begin(), d->extensions.end(), key) != d->extensions.end()) {
            return d.get();
        }
    }
    return nullptr;
}

auto DialectRegistry::names() const -> std::vector<std::string>
{
    std::vector<std::string> out;
    for (auto const& d : dialects_) {
        out.push_back(d->name);
    }
    return out;
}

auto DialectRegistry::builtin() -> DialectRegistry const&
{
    static DialectRegistry const registry = [] {
        DialectRegistry r;
        r.add(make_generic());
        r.add(make_operon());
        r.add(make_pysr());
        r.add(make_alias("heuristiclab", "hl", true));
        r.add(make_alias("tir", "tir", false));
        r.add(make_alias("itea", "itea", false));
        r.add(make_alias("bingo", "bingo", true));
        r.add(make_alias("gomea", "gomea", true));
        r.add(make_alias("sbp", "sbp", true));
        r.add(make_alias("eplex", "eplex", true));
        r.add(make_alias("feat", "feat", true));
        return r;
    }();
    return registry;
}

} // namespace egsr::expr
