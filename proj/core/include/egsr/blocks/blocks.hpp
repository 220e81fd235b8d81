// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_BLOCKS_BLOCKS_HPP
#define EGSR_BLOCKS_BLOCKS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "egsr/catalog/catalog.hpp"
#include "egsr/egraph/egraph.hpp"
#include "egsr/expr/expr.hpp"

namespace egsr::blocks {

inline constexpr std::size_t kMaxPatternSize = 10;

// A mined pattern in prefix order, one code per node: operator in the high
// byte, variable index below it. Pattern variables carry no index, and every
// parameter or constant leaf becomes the same anonymous parameter code.
using Code = std::vector<std::uint32_t>;

[[nodiscard]] constexpr auto encode(expr::Op op, std::uint32_t index = 0) noexcept -> std::uint32_t
{
    return (static_cast<std::uint32_t>(op) << 24U) | (index & 0xFFFFFFU);
}
[[nodiscard]] constexpr auto code_op(std::uint32_t c) noexcept -> expr::Op { return static_cast<expr::Op>(c >> 24U); }
[[nodiscard]] constexpr auto code_index(std::uint32_t c) noexcept -> std::uint32_t { return c & 0xFFFFFFU; }

// Patterns stored back to back in one buffer.
class PatternList {
public:
    [[nodiscard]] auto size() const noexcept -> std::size_t { return offsets_.size() - 1; }
    [[nodiscard]] auto operator[](std::size_t i) const -> std::span<std::uint32_t const>
    {
        return { codes_.data() + offsets_[i], offsets_[i + 1] - offsets_[i] };
    }
    void push(std::span<std::uint32_t const> code);
    void push_binary(std::uint32_t op, std::span<std::uint32_t const> lhs, std::span<std::uint32_t const> rhs);
    void push_unary(std::uint32_t op, std::span<std::uint32_t const> child);
    void reserve(std::size_t patterns, std::size_t codes);

private:
    std::vector<std::uint32_t> codes_;
    std::vector<std::size_t> offsets_ { 0 };
};

// Building blocks of the expression rooted at `id`, walking each class
// through its cheapest e-node. Returns a multiset; `cap` prunes by node count
// while combining (no cap when empty).
auto get_patterns(egraph::EGraph const& g, egraph::EClassId id, std::optional<std::size_t> cap = std::nullopt) -> PatternList;

// Pattern variables become v0, v1, ... and parameters t0, t1, ... in order
// of appearance.
auto to_pattern(std::span<std::uint32_t const> code) -> expr::Pattern;
auto render_code(std::span<std::uint32_t const> code) -> std::string;

struct BlockStat {
    std::size_t count { 0 };
    double fitness_sum { 0.0 };

    [[nodiscard]] auto average() const noexcept -> double { return fitness_sum / static_cast<double>(count); }
};

struct CodeHash {
    auto operator()(Code const& c) const noexcept -> std::size_t;
};

using BlockStats = std::unordered_map<Code, BlockStat, CodeHash>;

// Adds every pattern once per occurrence, with `fitness` per occurrence.
void accumulate(BlockStats& stats, PatternList const& patterns, double fitness,
    std::optional<catalog::FilterAtom> const& size_filter = std::nullopt);

// Number of distinct canonical e-classes containing the pattern anywhere.
auto count_pattern(egraph::EGraph const& g, expr::Pattern const& p) -> std::size_t;

enum class Order : std::uint8_t { Count, Fitness };

struct DistributionQuery {
    std::optional<catalog::Comparison> size_cmp;
    std::int64_t size_bound { 0 };
    std::optional<std::size_t> limit;
    Order order { Order::Count };
    std::size_t min_count { 1 };
    std::optional<std::size_t> from_top;

    friend auto operator==(DistributionQuery const&, DistributionQuery const&) -> bool = default;
};

struct DistributionRow {
    std::string pattern;
    std::size_t count { 0 };
    double avg_fitness { 0.0 };
};

// Size cap used while mining for a size constraint; throws
// std::invalid_argument when the constraint asks for patterns above the
// hard cap.
auto mining_cap(DistributionQuery const& q) -> std::size_t;

// Building blocks of the best `from_top` expressions by fitness (all when
// empty), filtered by size and `min_count`, sorted by count or average
// fitness (descending, then by pattern text) and cut at `limit`.
auto distribution(egraph::EGraph const& g, catalog::ScoreCatalog const& cat, DistributionQuery const& q) -> std::vector<DistributionRow>;

} // namespace egsr::blocks

#endif
