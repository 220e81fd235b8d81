// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "egsr/expr/parser.hpp"
#include "egsr/session/command.hpp"
#include "egsr/session/session.hpp"
#include "egsr/session/snapshot.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "session_check.hpp"

namespace {

using namespace egsr;
using catalog::Comparison;
using catalog::Field;
using session::Session;

template <typename T>
auto parsed(std::string_view text) -> T
{
    auto c = session::parse_command(text);
    EXPECT_TRUE(std::holds_alternative<T>(c)) << text;
    return std::get<T>(c);
}

auto error_position(std::string_view text) -> std::optional<std::size_t>
{
    try {
        (void)session::parse_command(text);
    } catch (session::CommandError const& e) {
        return e.position();
    }
    return std::nullopt;
}

auto number(session::Cell const& c) -> double { return std::get<double>(c); }

auto column(session::Table const& t, std::string const& name) -> std::size_t
{
    auto it = std::find(t.columns.begin(), t.columns.end(), name);
    EXPECT_NE(it, t.columns.end()) << name;
    return static_cast<std::size_t>(it - t.columns.begin());
}

auto imported(Session& s, std::string const& name, std::string const& text, bool parse_parameters = false)
    -> session::ImportReport
{
    auto path = oracle::scratch_dir("import") + "/" + name;
    oracle::write_file(path, text);
    return s.import_file(path, parse_parameters);
}

TEST(Command, TopWithThreeAtoms)
{
    auto c = parsed<session::TopCmd>("top 3 with size > 3 with size < 6 with parameters > 1");
    EXPECT_EQ(c.n, 3U);
    std::vector<catalog::FilterAtom> want { { Field::Size, Comparison::Gt, 3 }, { Field::Size, Comparison::Lt, 6 },
        { Field::Parameters, Comparison::Gt, 1 } };
    EXPECT_EQ(c.filter.atoms, want);
    EXPECT_EQ(c.criterion, catalog::Criterion::Fitness);
    EXPECT_FALSE(c.constraint);
}

TEST(Command, TopByDlAndMatching)
{
    auto a = parsed<session::TopCmd>("top 3 with size < 5");
    EXPECT_EQ(a.filter.atoms.size(), 1U);
    auto b = parsed<session::TopCmd>("top 3 with size < 6 by dl");
    EXPECT_EQ(b.criterion, catalog::Criterion::Dl);
    auto c = parsed<session::TopCmd>("top 3 matching v0 + v0");
    ASSERT_TRUE(c.constraint);
    EXPECT_EQ(c.constraint->pattern, oracle::pattern("v0 + v0"));
    EXPECT_FALSE(c.constraint->negated);
    auto d = parsed<session::TopCmd>("top 10 with cost <= 9 by fitness not matching root sin(v0) * v1");
    ASSERT_TRUE(d.constraint);
    EXPECT_TRUE(d.constraint->negated);
    EXPECT_TRUE(d.constraint->root_only);
    EXPECT_EQ(d.filter.atoms[0], (catalog::FilterAtom { Field::Cost, Comparison::Le, 9 }));
}

TEST(Command, DistributionExample)
{
    auto c = parsed<session::DistributionCmd>("distribution with size <= 7 limited at 25 by fitness with at least 1000 from top 10000");
    blocks::DistributionQuery want;
    want.size_cmp = Comparison::Le;
    want.size_bound = 7;
    want.limit = 25;
    want.order = blocks::Order::Fitness;
    want.min_count = 1000;
    want.from_top = 10000;
    EXPECT_EQ(c.query, want);
    auto bare = parsed<session::DistributionCmd>("distribution by count");
    EXPECT_EQ(bare.query, blocks::DistributionQuery {});
}

TEST(Command, OtherCommands)
{
    EXPECT_EQ(parsed<session::ReportCmd>("report 12").id, 12U);
    EXPECT_EQ(parsed<session::SubtreesCmd>("subtrees 4").id, 4U);
    auto o = parsed<session::OptimizeCmd>("optimize 5 20");
    EXPECT_EQ(o.id, 5U);
    EXPECT_EQ(o.restarts, 20);
    EXPECT_FALSE(parsed<session::OptimizeCmd>("optimize 5").restarts);
    auto i = parsed<session::InsertCmd>("insert t0 * sqrt(x0) + t0 * x4");
    EXPECT_EQ(i.expr, oracle::parse("t0 * sqrt(x0) + t0 * x4"));
    EXPECT_EQ(parsed<session::InsertCmd>("insert sqrt(x0 |**| t0)").expr, oracle::parse("sqrt(x0 |**| t0)"));
    EXPECT_EQ(parsed<session::ParetoCmd>("pareto by dl").criterion, catalog::Criterion::Dl);
    EXPECT_EQ(parsed<session::ParetoCmd>("pareto").criterion, catalog::Criterion::Fitness);
    EXPECT_EQ(parsed<session::CountPatternCmd>("count-pattern v0 * x1").pattern, oracle::pattern("v0 * x1"));
    EXPECT_EQ(parsed<session::SaveCmd>("save egraph.bin").path, "egraph.bin");
    EXPECT_EQ(parsed<session::LoadCmd>("load \"my dir/egraph.bin\"").path, "my dir/egraph.bin");
    auto imp = parsed<session::ImportCmd>("import egraph.operon True");
    EXPECT_EQ(imp.path, "egraph.operon");
    EXPECT_TRUE(imp.parse_parameters);
    EXPECT_FALSE(parsed<session::ImportCmd>("import runs.csv False").parse_parameters);
    EXPECT_EQ(parsed<session::SimplifyCmd>("simplify 3").id, 3U);
}

TEST(Command, Mutating)
{
    EXPECT_TRUE(session::is_mutating(session::parse_command("insert x0")));
    EXPECT_TRUE(session::is_mutating(session::parse_command("optimize 1")));
    EXPECT_TRUE(session::is_mutating(session::parse_command("load a.bin")));
    EXPECT_TRUE(session::is_mutating(session::parse_command("import a.csv False")));
    EXPECT_FALSE(session::is_mutating(session::parse_command("top 3")));
    EXPECT_FALSE(session::is_mutating(session::parse_command("save a.bin")));
    EXPECT_EQ(session::command_name(session::parse_command("count-pattern v0")), "count-pattern");
}

TEST(Command, NegativeCountIsRejected)
{
    auto at = error_position("top -1 with size < 5");
    ASSERT_TRUE(at);
    EXPECT_EQ(*at, 4U);
}

TEST(Command, NearMissesFailWithPositions)
{
    struct Case {
        char const* text;
        std::size_t position;
    };
    std::vector<Case> cases {
        { "", 0 },
        { "tops 3", 0 },
        { "top", 3 },
        { "top three", 4 },
        { "top 3 with", 10 },
        { "top 3 with height < 4", 11 },
        { "top 3 with size << 4", 17 },
        { "top 3 with size < four", 18 },
        { "top 3 by accuracy", 9 },
        { "top 3 sorted by dl", 6 },
        { "top 3 not v0", 10 },
        { "top 3 matching", 14 },
        { "top 3 matching v0 +", 19 },
        { "report", 6 },
        { "report x", 7 },
        { "report 3 4", 9 },
        { "optimize 3 0", 11 },
        { "insert", 6 },
        { "insert x0 +* x1", 11 },
        { "pareto by size", 10 },
        { "distribution with size <= 11 by count", 26 },
        { "distribution limited 5 by count", 21 },
        { "distribution with size <= 5", 27 },
        { "distribution by count with at most 3", 30 },
        { "load \"unterminated", 5 },
        { "count-pattern", 13 },
        { "import models.csv maybe", 18 },
        { "import models.csv", 17 },
        { "save", 4 },
    };
    for (auto const& c : cases) {
        auto at = error_position(c.text);
        ASSERT_TRUE(at) << c.text;
        EXPECT_EQ(*at, c.position) << c.text;
    }
}

TEST(Command, MutatedCommandsNeverEscapeTheParser)
{
    // deleting or duplicating one character either parses or fails with a
    // position inside the text
    std::vector<std::string> valid { "top 3 with size > 3 with size < 6 with parameters > 1", "top 3 with size < 6 by dl",
        "top 3 matching v0 + v0", "distribution with size <= 7 limited at 25 by fitness with at least 1000 from top 10000",
        "insert t0 * sqrt(x0) + t0 * x4", "optimize 5 3", "pareto by fitness", "count-pattern sqrt(v0) * v1",
        "import runs.operon True" };
    oracle::Rng rng(3);
    std::size_t failures = 0;
    for (auto const& v : valid) {
        EXPECT_NO_THROW((void)session::parse_command(v)) << v;
        for (int k = 0; k < 200; ++k) {
            auto s = v;
            auto i = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
            if (k % 2 == 0) {
                s.erase(i, 1);
            } else {
                s.insert(i, 1, "x(<;-9 "[static_cast<std::size_t>(k / 2) % 7]);
            }
            try {
                (void)session::parse_command(s);
            } catch (session::CommandError const& e) {
                ++failures;
                EXPECT_LE(e.position(), s.size()) << s;
                EXPECT_FALSE(e.detail().empty());
            }
        }
    }
    EXPECT_GT(failures, 100U);
}

TEST(Subtrees, SumOfProductsDecomposition)
{
    std::vector<std::string> got;
    for (auto const& e : session::distinct_subtrees(oracle::parse("t0 * x3 + t1 * x1"))) {
        got.push_back(expr::render(e));
    }
    EXPECT_EQ(got, (std::vector<std::string> { "(t0 * x3)", "(t0 * x1)", "t0", "x3", "x1" }));
}

TEST(Subtrees, LeafIsItself)
{
    auto s = session::distinct_subtrees(oracle::parse("t4"));
    ASSERT_EQ(s.size(), 1U);
    EXPECT_EQ(s[0], expr::Expr::param(0));
}

TEST(Subtrees, CommandRowsCarryFitness)
{
    Session s(oracle::demo_config());
    imported(s, "m.csv", "expr,p,f\nt0 * x3 + t1 * x1,1;1,-9\n");
    auto id = std::to_string(s.catalog().entries().front()->id.value);
    auto t = s.run("subtrees " + id);
    ASSERT_EQ(t.rows.size(), 5U);
    for (auto const& row : t.rows) {
        EXPECT_TRUE(std::holds_alternative<double>(row[2]));
    }
    // reruns on a fresh session are identical
    Session again(oracle::demo_config());
    imported(again, "m.csv", "expr,p,f\nt0 * x3 + t1 * x1,1;1,-9\n");
    EXPECT_EQ(session::format_table(again.run("subtrees " + id)), session::format_table(t));
}

TEST(Report, PerfectFitHasUnitR2)
{
    Session s(oracle::demo_config());
    auto t = s.run("insert t0 * sqrt(x0) + t1 * x4");
    auto id = std::get<std::int64_t>(t.rows[0][0]);
    auto r = s.run("report " + std::to_string(id));
    EXPECT_TRUE(r.vertical);
    EXPECT_NEAR(number(r.rows[0][column(r, "R2 (train)")]), 1.0, 1e-12);
    EXPECT_EQ(r.columns.size(), 10U);
}

TEST(Report, StoresDlForLaterQueries)
{
    auto config = oracle::demo_config();
    config.calculate_dl = false;
    Session s(config);
    imported(s, "m.csv", oracle::demo_models_csv());
    EXPECT_THROW((void)s.run("top 3 by dl"), catalog::CatalogError);
    auto id = std::get<std::int64_t>(s.run("top 1").rows[0][0]);
    s.run("report " + std::to_string(id));
    auto t = s.run("top 3 by dl");
    ASSERT_EQ(t.rows.size(), 1U);
    EXPECT_EQ(std::get<std::int64_t>(t.rows[0][0]), id);
    EXPECT_EQ(s.calculate_all_dl(), 11U);
    EXPECT_EQ(s.run("top 20 by dl").rows.size(), 12U);
}

TEST(Report, TestSetEqualToTrainGivesSameMetrics)
{
    auto config = oracle::demo_config();
    config.test = config.train;
    Session s(config);
    imported(s, "m.csv", oracle::demo_models_csv());
    auto r = s.run("report 9");
    for (auto name : { "MSE", "R2", "NLL", "DL" }) {
        EXPECT_EQ(r.rows[0][column(r, std::string(name) + " (train)")], r.rows[0][column(r, std::string(name) + " (test)")]);
    }
}

TEST(Report, UnknownIdAndMissingData)
{
    Session s(oracle::demo_config());
    EXPECT_THROW((void)s.run("report 3"), session::UnknownIdError);
    Session bare;
    EXPECT_THROW((void)bare.run("insert x0"), session::SessionError);
}

TEST(Insert, StoresOneExpression)
{
    Session s(oracle::demo_config());
    auto nodes = s.graph().node_count();
    auto t = s.run("insert t0 * sqrt(x0) + t0 * x4");
    EXPECT_EQ(s.catalog().size(), 1U);
    ASSERT_EQ(t.rows.size(), 1U);
    // t0, x0, sqrt, *, x4, *, +
    EXPECT_EQ(s.graph().node_count(), nodes + 7);
    EXPECT_EQ(std::get<std::vector<double>>(t.rows[0][3]).size(), 1U);
}

TEST(Insert, ReinsertReportsExistingRecord)
{
    Session s(oracle::demo_config());
    auto first = s.run("insert t0 * x4 + t1");
    auto counters = std::pair(s.graph().node_count(), s.catalog().size());
    auto second = s.run("insert t1 + t0 * x4");
    EXPECT_EQ(std::pair(s.graph().node_count(), s.catalog().size()), counters);
    EXPECT_EQ(second.rows, first.rows);
    EXPECT_EQ(second.messages.size(), 1U);
}

TEST(Insert, RecoversGeneratingModel)
{
    Session s(oracle::demo_config());
    auto t = s.run("insert t0 * sqrt(x0) + t1 * x4");
    auto theta = std::get<std::vector<double>>(t.rows[0][3]);
    EXPECT_NEAR(theta[0], 2.0, 1e-6);
    EXPECT_NEAR(theta[1], 3.0, 1e-6);
}

TEST(Optimize, NeverWorsens)
{
    Session s(oracle::demo_config());
    auto id = std::to_string(std::get<std::int64_t>(s.run("insert sqrt(x0 |**| t0) * t1").rows[0][0]));
    double best = s.catalog().entries().front()->record.fitness;
    for (int k = 0; k < 8; ++k) {
        s.run("optimize " + id + " 1");
        double now = s.catalog().find(egraph::EClassId { static_cast<std::uint32_t>(std::stoul(id)) })->record.fitness;
        EXPECT_GE(now, best);
        best = now;
    }
}

TEST(Simplify, LeavesSessionGraphAlone)
{
    Session s(oracle::demo_config());
    auto id = std::get<std::int64_t>(s.run("insert (t0 * x0) / x0 + x4").rows[0][0]);
    auto nodes = s.graph().node_count();
    auto t = s.run("simplify " + std::to_string(id));
    EXPECT_EQ(s.graph().node_count(), nodes);
    EXPECT_LE(std::get<std::int64_t>(t.rows[0][4]), std::get<std::int64_t>(t.rows[0][2]));
}

TEST(Import, SqrtModelRow)
{
    Session s(oracle::demo_config());
    auto r = imported(s, "run.csv", "x0^p0 + p1*x1,0.2;3.1,0.89\n");
    EXPECT_EQ(r.imported, 1U);
    EXPECT_TRUE(r.errors.empty());
    auto entries = s.catalog().entries();
    ASSERT_EQ(entries.size(), 1U);
    auto const& rec = entries[0]->record;
    EXPECT_EQ(rec.params, (std::vector<double> { 0.2, 3.1 }));
    EXPECT_EQ(rec.fitness, 0.89);
    EXPECT_EQ(rec.size, 7U);
    EXPECT_EQ(entries[0]->expr, oracle::parse("x0 ^ t0 + t1 * x1"));
}

TEST(Import, EmptyFile)
{
    Session s(oracle::demo_config());
    auto r = imported(s, "empty.csv", "");
    EXPECT_EQ(r.rows, 0U);
    EXPECT_EQ(r.imported, 0U);
    EXPECT_TRUE(r.errors.empty());
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Import, SecondPassAddsNoNodes)
{
    Session s(oracle::demo_config());
    auto path = oracle::scratch_dir("twice") + "/models.csv";
    oracle::write_file(path, oracle::demo_models_csv());
    s.import_file(path, false);
    auto nodes = s.graph().node_count();
    auto classes = s.graph().class_count();
    auto r = s.import_file(path, false);
    EXPECT_EQ(r.imported, 12U);
    EXPECT_EQ(s.graph().node_count(), nodes);
    EXPECT_EQ(s.graph().class_count(), classes);
    EXPECT_EQ(s.catalog().size(), 12U);
}

TEST(Import, RowErrorsAreCollected)
{
    Session s(oracle::demo_config());
    auto r = imported(s, "bad.csv", "x0 + ,,-1\nx0 * t0,1;2,-1\nx0,,nan\nx1,,-2\nonly one field\n");
    EXPECT_EQ(r.rows, 5U);
    EXPECT_EQ(r.imported, 1U);
    ASSERT_EQ(r.errors.size(), 4U);
    EXPECT_NE(r.errors[0].find("line 1, column"), std::string::npos);
    EXPECT_NE(r.errors[1].find("1 parameter(s) but 2"), std::string::npos);
}

TEST(Import, LiteralExtraction)
{
    Session s(oracle::demo_config());
    imported(s, "lit.operon", "2.5 * X1 + 0.5 * X5,,-1\n", true);
    auto const* e = s.catalog().entries().front();
    EXPECT_EQ(e->expr, oracle::parse("t0 * x0 + t1 * x4"));
    EXPECT_EQ(e->record.params, (std::vector<double> { 2.5, 0.5 }));
}

TEST(Import, MixedToolsWarn)
{
    Session s(oracle::demo_config());
    EXPECT_TRUE(imported(s, "a.csv", "x0 * t0,2,-1\n").warnings.empty());
    auto r = imported(s, "b.operon", "X1 + X5,,-2\n");
    ASSERT_EQ(r.warnings.size(), 1U);
    EXPECT_NE(r.warnings[0].find("generic, operon"), std::string::npos);
    EXPECT_EQ(s.catalog().size(), 2U);
}

TEST(Import, UnknownExtensionFallsBack)
{
    Session s(oracle::demo_config());
    auto r = imported(s, "models.txt", "x0 + x4,,-1\n");
    EXPECT_EQ(r.dialect, "generic");
    EXPECT_EQ(r.imported, 1U);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings[0].find("unknown extension"), std::string::npos);
    EXPECT_THROW(s.import_file("/nonexistent/models.csv", false), session::SessionError);
}

TEST(Snapshot, RoundTripPreservesQueries)
{
    auto dir = oracle::scratch_dir("snap");
    Session s(oracle::demo_config());
    imported(s, "m.csv", oracle::demo_models_csv());
    s.run("insert t0 * sqrt(x0) + t0 * x4");
    s.save(dir + "/a.egsr");
    Session t(oracle::demo_config());
    t.load(dir + "/a.egsr");
    for (auto q : { "top 5", "top 20 by dl", "pareto by fitness", "count-pattern v0 * x4", "distribution by count" }) {
        EXPECT_EQ(oracle::run_printed(t, q), oracle::run_printed(s, q)) << q;
    }
}

TEST(Snapshot, CorruptFilesAreRejected)
{
    auto dir = oracle::scratch_dir("corrupt");
    Session s(oracle::demo_config());
    imported(s, "m.csv", oracle::demo_models_csv());
    s.save(dir + "/a.egsr");
    auto bytes = oracle::read_file(dir + "/a.egsr");

    oracle::write_file(dir + "/short.egsr", bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW(session::load_snapshot(dir + "/short.egsr"), session::SnapshotError);

    auto flipped = bytes;
    flipped[flipped.size() - 3] = static_cast<char>(flipped[flipped.size() - 3] ^ 0x40);
    EXPECT_THROW((void)session::decode_snapshot(flipped), session::SnapshotError);

    auto magic = bytes;
    magic[0] = 'X';
    EXPECT_THROW((void)session::decode_snapshot(magic), session::SnapshotError);

    auto version = bytes;
    version[8] = static_cast<char>(session::kSnapshotVersion + 1);
    EXPECT_THROW((void)session::decode_snapshot(version), session::SnapshotError);

    Session t(oracle::demo_config());
    EXPECT_THROW(t.load(dir + "/short.egsr"), session::SnapshotError);
    EXPECT_THROW(t.load(dir + "/missing.egsr"), session::SnapshotError);
    EXPECT_TRUE(t.catalog().empty());
}

TEST(Snapshot, TranscriptSurvivesReloads)
{
    auto r = oracle::persistence_check(oracle::scratch_dir("transcript"));
    EXPECT_EQ(r.commands, 20U);
    EXPECT_EQ(r.errors, 1U); // the unknown id at the end
    EXPECT_TRUE(r.identical) << r.first_difference;
}

} // namespace
