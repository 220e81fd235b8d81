// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/matchdb/pattern_db.hpp"

#include <algorithm>

namespace egsr::matchdb {

auto Trie::find(std::uint32_t key) const noexcept -> Trie const*
{
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) {
        return nullptr;
    }
    return &children_[static_cast<std::size_t>(it - keys_.begin())];
}

auto Trie::descend(std::uint32_t key) -> Trie&
{
    // ids mostly arrive in increasing order, so appending is the common case
    if (keys_.empty() || keys_.back() < key) {
        keys_.push_back(key);
        children_.emplace_back();
        return children_.back();
    }
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    auto pos = static_cast<std::size_t>(it - keys_.begin());
    if (it == keys_.end() || *it != key) {
        keys_.insert(it, key);
        children_.emplace(children_.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    return children_[pos];
}

void PatternDB::insert(egraph::ENode const& node, egraph::EClassId owner)
{
    auto add_path = [&](Trie& root) {
        Trie* level = &root.descend(owner.value);
        for (auto c : node.kids()) {
            level = &level->descend(c.value);
        }
    };
    add_path(tries_[Token::of(node)]);
    if (node.op == expr::Op::Param) {
        add_path(tries_[Token::any_parameter()]);
    }
}

auto PatternDB::lookup(Token const& token) const noexcept -> Trie const*
{
    auto it = tries_.find(token);
    return it == tries_.end() ? nullptr : &it->second;
}

} // namespace egsr::matchdb
