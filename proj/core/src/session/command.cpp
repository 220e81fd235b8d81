// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/session/command.hpp"

#include <cctype>
#include <charconv>
#include <limits>

#include <fmt/format.h>

#include "egsr/expr/parser.hpp"

namespace egsr::session {

CommandError::CommandError(std::size_t position, std::string const& message)
    : std::runtime_error(fmt::format("{} (at position {})", message, position))
    , position_(position)
    , detail_(message)
{
}

namespace {

    using catalog::Comparison;

    class Scanner {
    public:
        explicit Scanner(std::string_view text)
            : text_(text)
        {
        }

        void skip_space()
        {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
        }

        [[nodiscard]] auto at_end() -> bool
        {
            skip_space();
            return pos_ >= text_.size();
        }

        [[nodiscard]] auto pos() const noexcept -> std::size_t { return pos_; }

        // Next word: letters, digits, '-', '_' or '.'; empty at a symbol.
        auto peek_word() -> std::string_view
        {
            skip_space();
            std::size_t end = pos_;
            while (end < text_.size()) {
                auto c = static_cast<unsigned char>(text_[end]);
                if (std::isalnum(c) || c == '-' || c == '_' || c == '.') {
                    ++end;
                } else {
                    break;
                }
            }
            return text_.substr(pos_, end - pos_);
        }

        auto accept(std::string_view word) -> bool
        {
            if (peek_word() == word) {
                pos_ += word.size();
                return true;
            }
            return false;
        }

        void expect(std::string_view word, std::string_view what)
        {
            if (!accept(word)) {
                fail(fmt::format("expected {}", what));
            }
        }

        auto integer(std::string_view what) -> std::int64_t
        {
            skip_space();
            auto start = pos_;
            auto w = peek_word();
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
            if (w.empty() || ec != std::errc {} || ptr != w.data() + w.size()) {
                fail(fmt::format("expected {}", what), start);
            }
            pos_ += w.size();
            return v;
        }

        auto natural(std::string_view what) -> std::int64_t
        {
            skip_space();
            auto start = pos_;
            auto v = integer(what);
            if (v < 0) {
                fail(fmt::format("expected {}, got a negative number", what), start);
            }
            return v;
        }

        auto id() -> std::uint32_t
        {
            skip_space();
            auto start = pos_;
            auto v = natural("an expression id");
            if (v > std::numeric_limits<std::uint32_t>::max()) {
                fail("id out of range", start);
            }
            return static_cast<std::uint32_t>(v);
        }

        auto comparison() -> Comparison
        {
            skip_space();
            auto rest = text_.substr(pos_);
            for (auto [sym, cmp] : { std::pair { "<=", Comparison::Le }, std::pair { ">=", Comparison::Ge },
                     std::pair { "<", Comparison::Lt }, std::pair { ">", Comparison::Gt }, std::pair { "=", Comparison::Eq } }) {
                if (rest.starts_with(sym)) {
                    pos_ += std::string_view(sym).size();
                    return cmp;
                }
            }
            fail("expected one of < <= = > >=");
        }

        // Everything up to the end, trimmed.
        auto rest(std::string_view what) -> std::pair<std::string_view, std::size_t>
        {
            skip_space();
            auto start = pos_;
            auto r = text_.substr(pos_);
            while (!r.empty() && std::isspace(static_cast<unsigned char>(r.back()))) {
                r.remove_suffix(1);
            }
            if (r.empty()) {
                fail(fmt::format("expected {}", what));
            }
            pos_ = text_.size();
            return { r, start };
        }

        // A path: one whitespace-delimited token, or a double-quoted string.
        auto path() -> std::string
        {
            skip_space();
            auto start = pos_;
            if (pos_ < text_.size() && text_[pos_] == '"') {
                auto close = text_.find('"', pos_ + 1);
                if (close == std::string_view::npos) {
                    fail("unterminated quoted path", start);
                }
                pos_ = close + 1;
                if (close == start + 1) {
                    fail("expected a file path", start);
                }
                return std::string(text_.substr(start + 1, close - start - 1));
            }
            while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            if (pos_ == start) {
                fail("expected a file path");
            }
            return std::string(text_.substr(start, pos_ - start));
        }

        void finish()
        {
            if (!at_end()) {
                fail(fmt::format("unexpected '{}'", peek_word().empty() ? text_.substr(pos_, 1) : peek_word()));
            }
        }

        [[noreturn]] void fail(std::string const& message) const { fail(message, pos_); }
        [[noreturn]] static void fail(std::string const& message, std::size_t at) { throw CommandError(at, message); }

    private:
        std::string_view text_;
        std::size_t pos_ { 0 };
    };

    auto parse_pattern_at(std::string_view text, std::size_t offset) -> expr::Pattern
    {
        try {
            return expr::parse_pattern(text);
        } catch (expr::ParseError const& e) {
            throw CommandError(offset + e.position(), e.detail());
        }
    }

    auto field(Scanner& s) -> catalog::Field
    {
        if (s.accept("size")) {
            return catalog::Field::Size;
        }
        if (s.accept("cost")) {
            return catalog::Field::Cost;
        }
        if (s.accept("parameters")) {
            return catalog::Field::Parameters;
        }
        s.fail("expected size, cost or parameters");
    }

    auto criterion(Scanner& s) -> catalog::Criterion
    {
        if (s.accept("fitness")) {
            return catalog::Criterion::Fitness;
        }
        if (s.accept("dl")) {
            return catalog::Criterion::Dl;
        }
        s.fail("expected fitness or dl");
    }

    auto top(Scanner& s) -> TopCmd
    {
        TopCmd c;
        c.n = static_cast<std::size_t>(s.natural("a non-negative count"));
        while (s.accept("with")) {
            catalog::FilterAtom a;
            a.field = field(s);
            a.cmp = s.comparison();
            a.bound = s.integer("an integer bound");
            c.filter.atoms.push_back(a);
        }
        if (s.accept("by")) {
            c.criterion = criterion(s);
        }
        if (s.at_end()) {
            return c;
        }
        catalog::PatternConstraint pc;
        pc.negated = s.accept("not");
        s.expect("matching", pc.negated ? "'matching'" : "'with', 'by', 'not' or 'matching'");
        pc.root_only = s.accept("root");
        auto [text, at] = s.rest("a pattern");
        pc.pattern = parse_pattern_at(text, at);
        c.constraint = std::move(pc);
        return c;
    }

    auto distribution(Scanner& s) -> DistributionCmd
    {
        DistributionCmd c;
        auto& q = c.query;
        std::size_t bound_at = 0;
        if (s.accept("with")) {
            if (s.accept("size")) {
                q.size_cmp = s.comparison();
                s.skip_space();
                bound_at = s.pos();
                q.size_bound = s.integer("a size bound");
            } else {
                s.fail("expected 'size'");
            }
        }
        if (s.accept("limited")) {
            s.expect("at", "'at'");
            q.limit = static_cast<std::size_t>(s.natural("a row limit"));
        }
        s.expect("by", "'by count' or 'by fitness'");
        if (s.accept("count")) {
            q.order = blocks::Order::Count;
        } else if (s.accept("fitness")) {
            q.order = blocks::Order::Fitness;
        } else {
            s.fail("expected count or fitness");
        }
        if (s.accept("with")) {
            s.expect("at", "'at least'");
            s.expect("least", "'least'");
            q.min_count = static_cast<std::size_t>(s.natural("a minimum count"));
        }
        if (s.accept("from")) {
            s.expect("top", "'top'");
            q.from_top = static_cast<std::size_t>(s.natural("a number of expressions"));
        }
        s.finish();
        try {
            (void)blocks::mining_cap(q);
        } catch (std::invalid_argument const& e) {
            Scanner::fail(e.what(), bound_at);
        }
        return c;
    }

    auto boolean(Scanner& s) -> bool
    {
        for (auto w : { "True", "true", "TRUE", "1" }) {
            if (s.accept(w)) {
                return true;
            }
        }
        for (auto w : { "False", "false", "FALSE", "0" }) {
            if (s.accept(w)) {
                return false;
            }
        }
        s.fail("expected True or False");
    }

} // namespace

auto parse_command(std::string_view text) -> Command
{
    Scanner s(text);
    if (s.at_end()) {
        Scanner::fail("empty command", s.pos());
    }
    auto start = s.pos();
    auto word = s.peek_word();
    s.accept(word);
    if (word == "top") {
        return top(s);
    }
    if (word == "report") {
        ReportCmd c { s.id() };
        s.finish();
        return c;
    }
    if (word == "subtrees") {
        SubtreesCmd c { s.id() };
        s.finish();
        return c;
    }
    if (word == "simplify") {
        SimplifyCmd c { s.id() };
        s.finish();
        return c;
    }
    if (word == "optimize") {
        OptimizeCmd c;
        c.id = s.id();
        if (!s.at_end()) {
            auto at = s.pos();
            auto r = s.natural("a number of restarts");
            if (r < 1 || r > 10000) {
                Scanner::fail("restarts must be between 1 and 10000", at);
            }
            c.restarts = static_cast<int>(r);
        }
        s.finish();
        return c;
    }
    if (word == "insert") {
        auto [body, at] = s.rest("an expression");
        try {
            return InsertCmd { expr::parse_expression(body).expr, std::string(body) };
        } catch (expr::ParseError const& e) {
            throw CommandError(at + e.position(), e.detail());
        }
    }
    if (word == "pareto") {
        ParetoCmd c;
        if (s.accept("by")) {
            c.criterion = criterion(s);
        }
        s.finish();
        return c;
    }
    if (word == "count-pattern") {
        auto [body, at] = s.rest("a pattern");
        return CountPatternCmd { parse_pattern_at(body, at) };
    }
    if (word == "distribution") {
        return distribution(s);
    }
    if (word == "save") {
        SaveCmd c { s.path() };
        s.finish();
        return c;
    }
    if (word == "load") {
        LoadCmd c { s.path() };
        s.finish();
        return c;
    }
    if (word == "import") {
        ImportCmd c;
        c.path = s.path();
        c.parse_parameters = boolean(s);
        s.finish();
        return c;
    }
    Scanner::fail(word.empty() ? "expected a command" : fmt::format("unknown command '{}'", word), start);
}

auto is_mutating(Command const& c) -> bool
{
    return std::holds_alternative<ReportCmd>(c) || std::holds_alternative<SubtreesCmd>(c) || std::holds_alternative<OptimizeCmd>(c)
        || std::holds_alternative<InsertCmd>(c) || std::holds_alternative<LoadCmd>(c) || std::holds_alternative<ImportCmd>(c);
}

auto command_name(Command const& c) -> std::string_view
{
    static constexpr std::string_view names[] = { "top", "report", "subtrees", "optimize", "insert", "pareto", "count-pattern",
        "distribution", "save", "load", "import", "simplify" };
    return names[c.index()];
}

} // namespace egsr::session
