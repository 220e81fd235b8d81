// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_MATCHDB_PATTERN_DB_HPP
#define EGSR_MATCHDB_PATTERN_DB_HPP

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "egsr/egraph/enode.hpp"

namespace egsr::matchdb {

// Grammar token keying one trie: an operator, or a specific terminal.
struct Token {
    expr::Op op { expr::Op::Const };
    std::uint64_t payload { 0 };

    // Payload of the token collecting every parameter leaf regardless of index.
    static constexpr std::uint64_t kAnyParameter = std::numeric_limits<std::uint64_t>::max();

    static auto of(egraph::ENode const& n) -> Token
    {
        return { n.op, n.is_leaf() ? n.payload : 0 };
    }
    static auto any_parameter() -> Token { return { expr::Op::Param, kAnyParameter }; }

    friend constexpr auto operator==(Token const&, Token const&) -> bool = default;
};

struct TokenHash {
    auto operator()(Token const& t) const noexcept -> std::size_t
    {
        return std::hash<std::uint64_t> {}(t.payload * 31 + static_cast<std::uint64_t>(t.op));
    }
};

// Sorted-key trie over e-class ids. The first level holds the classes owning
// an e-node with the token; each following level holds that e-node's child
// ids in order.
class Trie {
public:
    [[nodiscard]] auto empty() const noexcept -> bool { return keys_.empty(); }
    [[nodiscard]] auto size() const noexcept -> std::size_t { return keys_.size(); }
    [[nodiscard]] auto keys() const noexcept -> std::vector<std::uint32_t> const& { return keys_; }
    [[nodiscard]] auto child_at(std::size_t i) const noexcept -> Trie const& { return children_[i]; }
    [[nodiscard]] auto find(std::uint32_t key) const noexcept -> Trie const*;

    auto descend(std::uint32_t key) -> Trie&;

    friend auto operator==(Trie const&, Trie const&) -> bool = default;

private:
    std::vector<std::uint32_t> keys_;
    std::vector<Trie> children_;
};

class PatternDB {
public:
    // Records the path token -> owner -> child_1 -> ... -> child_k. The node
    // must already be canonical.
    void insert(egraph::ENode const& node, egraph::EClassId owner);
    void clear() noexcept { tries_.clear(); }

    [[nodiscard]] auto lookup(Token const& token) const noexcept -> Trie const*;
    [[nodiscard]] auto token_count() const noexcept -> std::size_t { return tries_.size(); }

    friend auto operator==(PatternDB const&, PatternDB const&) -> bool = default;

private:
    std::unordered_map<Token, Trie, TokenHash> tries_;
};

} // namespace egsr::matchdb

#endif
