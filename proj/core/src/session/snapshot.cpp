// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/session/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include <fmt/format.h>
#include <zlib.h>

namespace egsr::session {

// Layout (little endian):
//   "EGSRSNAP" | u32 version | u32 crc32(payload) | u64 payload length | payload
// The payload is a sequence of sections: u32 tag | u64 length | bytes.

namespace {

    constexpr std::string_view kMagic = "EGSRSNAP";
    constexpr std::uint32_t kGraphSection = 1;
    constexpr std::uint32_t kRecordSection = 2;
    constexpr std::uint32_t kMetaSection = 3;

    class Writer {
    public:
        void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
        void u32(std::uint32_t v)
        {
            for (int i = 0; i < 4; ++i) {
                u8(static_cast<std::uint8_t>(v >> (8 * i)));
            }
        }
        void u64(std::uint64_t v)
        {
            for (int i = 0; i < 8; ++i) {
                u8(static_cast<std::uint8_t>(v >> (8 * i)));
            }
        }
        void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
        void str(std::string_view s)
        {
            u64(s.size());
            buf_.append(s);
        }
        void raw(std::string_view s) { buf_.append(s); }
        void section(std::uint32_t tag, Writer const& body)
        {
            u32(tag);
            u64(body.buf_.size());
            buf_.append(body.buf_);
        }
        [[nodiscard]] auto bytes() const -> std::string const& { return buf_; }

    private:
        std::string buf_;
    };

    class Reader {
    public:
        explicit Reader(std::string_view data)
            : data_(data)
        {
        }

        auto u8() -> std::uint8_t
        {
            need(1);
            return static_cast<std::uint8_t>(data_[pos_++]);
        }
        auto u32() -> std::uint32_t
        {
            std::uint32_t v = 0;
            for (int i = 0; i < 4; ++i) {
                v |= static_cast<std::uint32_t>(u8()) << (8 * i);
            }
            return v;
        }
        auto u64() -> std::uint64_t
        {
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i) {
                v |= static_cast<std::uint64_t>(u8()) << (8 * i);
            }
            return v;
        }
        auto f64() -> double { return std::bit_cast<double>(u64()); }
        auto bytes(std::uint64_t n) -> std::string_view
        {
            need(n);
            auto s = data_.substr(pos_, n);
            pos_ += n;
            return s;
        }
        auto str() -> std::string { return std::string(bytes(u64())); }
        // Element count, sanity-checked against the bytes left.
        auto count(std::size_t min_element_bytes) -> std::uint64_t
        {
            auto n = u64();
            if (min_element_bytes > 0 && n > (data_.size() - pos_) / min_element_bytes) {
                throw SnapshotError("snapshot section is inconsistent");
            }
            return n;
        }
        [[nodiscard]] auto done() const -> bool { return pos_ == data_.size(); }

    private:
        void need(std::uint64_t n) const
        {
            if (n > data_.size() - pos_) {
                throw SnapshotError("snapshot section is truncated");
            }
        }

        std::string_view data_;
        std::size_t pos_ { 0 };
    };

    void write_expr(Writer& w, expr::Expr const& e)
    {
        w.u8(static_cast<std::uint8_t>(e.op));
        if (e.op == expr::Op::Const) {
            w.f64(e.value);
        } else if (e.is_leaf()) {
            w.u32(e.index);
        }
        for (auto const& c : e.children) {
            write_expr(w, c);
        }
    }

    auto read_op(Reader& r) -> expr::Op
    {
        auto op = r.u8();
        if (op >= expr::kOpCount) {
            throw SnapshotError("snapshot contains an unknown operator");
        }
        return static_cast<expr::Op>(op);
    }

    auto read_expr(Reader& r, int depth = 0) -> expr::Expr
    {
        if (depth > 10000) {
            throw SnapshotError("snapshot expression is too deep");
        }
        auto op = read_op(r);
        switch (expr::arity(op)) {
        case 0:
            if (op == expr::Op::Const) {
                return expr::Expr::constant(r.f64());
            }
            return { op, r.u32(), 0.0, {} };
        case 1: return expr::Expr::unary(op, read_expr(r, depth + 1));
        default: {
            auto lhs = read_expr(r, depth + 1);
            auto rhs = read_expr(r, depth + 1);
            return expr::Expr::binary(op, std::move(lhs), std::move(rhs));
        }
        }
    }

    auto graph_section(egraph::EGraph const& g) -> Writer
    {
        auto s = g.export_state();
        Writer w;
        w.u64(s.parent.size());
        for (std::size_t i = 0; i < s.parent.size(); ++i) {
            w.u32(s.parent[i]);
            w.u32(s.set_size[i]);
            w.u64(s.nodes[i].size());
            for (auto const& n : s.nodes[i]) {
                w.u8(static_cast<std::uint8_t>(n.op));
                w.u64(n.payload);
                w.u32(n.children[0].value);
                w.u32(n.children[1].value);
            }
        }
        return w;
    }

    auto read_graph(Reader r) -> egraph::EGraph
    {
        egraph::GraphState s;
        auto n = r.count(16);
        s.parent.resize(n);
        s.set_size.resize(n);
        s.nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.parent[i] = r.u32();
            s.set_size[i] = r.u32();
            auto k = r.count(17);
            s.nodes[i].reserve(k);
            for (std::size_t j = 0; j < k; ++j) {
                egraph::ENode node;
                node.op = read_op(r);
                node.payload = r.u64();
                node.children[0] = egraph::EClassId { r.u32() };
                node.children[1] = egraph::EClassId { r.u32() };
                s.nodes[i].push_back(node);
            }
        }
        if (!r.done()) {
            throw SnapshotError("trailing bytes in the graph section");
        }
        try {
            return egraph::EGraph::from_state(std::move(s));
        } catch (egraph::EGraphError const& e) {
            throw SnapshotError(fmt::format("snapshot graph is invalid: {}", e.what()));
        }
    }

    auto record_section(catalog::ScoreCatalog const& cat) -> Writer
    {
        Writer w;
        auto entries = cat.entries();
        w.u64(entries.size());
        for (auto const* e : entries) {
            w.u32(e->id.value);
            write_expr(w, e->expr);
            auto const& r = e->record;
            w.u64(r.params.size());
            for (auto p : r.params) {
                w.f64(p);
            }
            w.f64(r.fitness);
            w.u8(r.dl ? 1 : 0);
            w.f64(r.dl.value_or(0.0));
            w.u64(r.size);
            w.u64(r.n_params);
            w.u8(static_cast<std::uint8_t>(r.loss));
        }
        return w;
    }

    auto read_records(Reader r, egraph::EGraph const& g) -> catalog::ScoreCatalog
    {
        catalog::ScoreCatalog cat;
        auto n = r.count(4);
        for (std::size_t i = 0; i < n; ++i) {
            egraph::EClassId id { r.u32() };
            if (!g.is_canonical(id)) {
                throw SnapshotError(fmt::format("record for id {} does not name a canonical e-class", id.value));
            }
            auto e = read_expr(r);
            fitdata::FitRecord rec;
            auto k = r.count(8);
            rec.params.resize(k);
            for (auto& p : rec.params) {
                p = r.f64();
            }
            rec.fitness = r.f64();
            bool has_dl = r.u8() != 0;
            double dl = r.f64();
            if (has_dl) {
                rec.dl = dl;
            }
            rec.size = r.u64();
            rec.n_params = r.u64();
            auto loss = r.u8();
            if (loss > 1) {
                throw SnapshotError("snapshot record has an unknown loss");
            }
            rec.loss = static_cast<fitdata::LossKind>(loss);
            try {
                cat.add(id, e, std::move(rec));
            } catch (catalog::CatalogError const& err) {
                throw SnapshotError(err.what());
            }
        }
        if (!r.done()) {
            throw SnapshotError("trailing bytes in the record section");
        }
        return cat;
    }

    auto meta_section(SnapshotMeta const& meta) -> Writer
    {
        Writer w;
        w.u64(meta.fit_counter);
        w.u64(meta.dialects.size());
        for (auto const& d : meta.dialects) {
            w.str(d);
        }
        return w;
    }

    auto read_meta(Reader r) -> SnapshotMeta
    {
        SnapshotMeta m;
        m.fit_counter = r.u64();
        auto n = r.count(8);
        for (std::size_t i = 0; i < n; ++i) {
            m.dialects.push_back(r.str());
        }
        return m;
    }

    auto crc(std::string_view s) -> std::uint32_t
    {
        uLong c = crc32(0L, Z_NULL, 0);
        // zlib takes uInt lengths; feed large payloads in pieces
        while (!s.empty()) {
            auto chunk = std::min<std::size_t>(s.size(), 1U << 30U);
            c = crc32(c, reinterpret_cast<Bytef const*>(s.data()), static_cast<uInt>(chunk));
            s.remove_prefix(chunk);
        }
        return static_cast<std::uint32_t>(c);
    }

} // namespace

auto encode_snapshot(egraph::EGraph const& g, catalog::ScoreCatalog const& cat, SnapshotMeta const& meta) -> std::string
{
    if (g.pending_repairs()) {
        throw SnapshotError("cannot save an e-graph with pending repairs");
    }
    Writer payload;
    payload.section(kGraphSection, graph_section(g));
    payload.section(kRecordSection, record_section(cat));
    payload.section(kMetaSection, meta_section(meta));
    Writer out;
    out.raw(kMagic);
    out.u32(kSnapshotVersion);
    out.u32(crc(payload.bytes()));
    out.u64(payload.bytes().size());
    out.raw(payload.bytes());
    return out.bytes();
}

auto decode_snapshot(std::string const& bytes) -> Snapshot
{
    std::string_view data(bytes);
    if (data.size() < kMagic.size() && kMagic.starts_with(data)) {
        throw SnapshotError("snapshot checksum mismatch: header is truncated");
    }
    if (!data.starts_with(kMagic)) {
        throw SnapshotError("not a snapshot file (bad magic)");
    }
    Reader header(data.substr(kMagic.size()));
    std::uint32_t version = 0;
    std::uint32_t checksum = 0;
    std::uint64_t length = 0;
    try {
        version = header.u32();
        checksum = header.u32();
        length = header.u64();
    } catch (SnapshotError const&) {
        throw SnapshotError("snapshot checksum mismatch: header is truncated");
    }
    if (version != kSnapshotVersion) {
        throw SnapshotError(fmt::format("snapshot version {} is not supported (expected {})", version, kSnapshotVersion));
    }
    auto const header_size = kMagic.size() + 16;
    auto payload = data.substr(header_size);
    if (payload.size() != length || crc(payload) != checksum) {
        throw SnapshotError("snapshot checksum mismatch: file is truncated or corrupt");
    }

    Reader r(payload);
    std::optional<egraph::EGraph> graph;
    std::optional<catalog::ScoreCatalog> cat;
    SnapshotMeta meta;
    std::string_view records;
    while (!r.done()) {
        auto tag = r.u32();
        auto body = r.bytes(r.u64());
        switch (tag) {
        case kGraphSection: graph = read_graph(Reader(body)); break;
        case kRecordSection: records = body; break;
        case kMetaSection: meta = read_meta(Reader(body)); break;
        default: break; // sections from newer writers are skipped
        }
    }
    if (!graph) {
        throw SnapshotError("snapshot has no graph section");
    }
    cat = read_records(Reader(records.empty() ? std::string_view("\0\0\0\0\0\0\0\0", 8) : records), *graph);
    return Snapshot { std::move(*graph), std::move(*cat), std::move(meta) };
}

void save_snapshot(std::string const& path, egraph::EGraph const& g, catalog::ScoreCatalog const& cat, SnapshotMeta const& meta)
{
    auto bytes = encode_snapshot(g, cat, meta);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw SnapshotError(fmt::format("cannot write '{}'", path));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw SnapshotError(fmt::format("error while writing '{}'", path));
    }
}

auto load_snapshot(std::string const& path) -> Snapshot
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SnapshotError(fmt::format("cannot open '{}'", path));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return decode_snapshot(buf.str());
}

} // namespace egsr::session
