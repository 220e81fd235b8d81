// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_SESSION_SNAPSHOT_HPP
#define EGSR_SESSION_SNAPSHOT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "egsr/catalog/catalog.hpp"
#include "egsr/egraph/egraph.hpp"

namespace egsr::session {

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Session counters that influence later command output.
struct SnapshotMeta {
    std::uint64_t fit_counter { 0 };
    std::vector<std::string> dialects;

    friend auto operator==(SnapshotMeta const&, SnapshotMeta const&) -> bool = default;
};

struct Snapshot {
    egraph::EGraph graph;
    catalog::ScoreCatalog catalog;
    SnapshotMeta meta;
};

auto encode_snapshot(egraph::EGraph const& g, catalog::ScoreCatalog const& cat, SnapshotMeta const& meta) -> std::string;
// Throws SnapshotError on a bad magic, version or checksum.
auto decode_snapshot(std::string const& bytes) -> Snapshot;

void save_snapshot(std::string const& path, egraph::EGraph const& g, catalog::ScoreCatalog const& cat, SnapshotMeta const& meta);
auto load_snapshot(std::string const& path) -> Snapshot;

} // namespace egsr::session

#endif
