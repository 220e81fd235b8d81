// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <unistd.h>

#include "egsr/session/session.hpp"
#include "repl.hpp"
#include "service.hpp"

namespace {

struct Options {
    std::string dataset;
    std::string test;
    std::string target;
    std::string loss { "mse" };
    bool calculate_dl { false };
    std::string load;
    std::vector<std::string> imports;
    bool parse_parameters { false };
    bool serve { false };
    std::string host { "127.0.0.1" };
    int port { 8080 };
    int restarts { 3 };
    std::uint64_t seed { 0 };
    bool quiet { false };
};

auto make_session(Options const& o) -> std::unique_ptr<egsr::session::Session>
{
    using namespace egsr;
    session::SessionConfig cfg;
    std::optional<std::string> target;
    if (!o.target.empty()) {
        target = o.target;
    }
    if (!o.dataset.empty()) {
        cfg.train = fitdata::load_csv(o.dataset, target);
    }
    if (!o.test.empty()) {
        if (!cfg.train) {
            throw std::runtime_error("--test needs --dataset");
        }
        cfg.test = fitdata::load_csv(o.test, target);
    }
    auto loss = fitdata::parse_loss(o.loss);
    if (!loss) {
        throw std::runtime_error(fmt::format("unknown loss '{}' (expected mse or gaussian)", o.loss));
    }
    cfg.loss = *loss;
    cfg.calculate_dl = o.calculate_dl;
    cfg.restarts = o.restarts;
    cfg.seed = o.seed;
    if (o.calculate_dl && !cfg.train) {
        throw std::runtime_error("--calculate-dl needs --dataset");
    }
    return std::make_unique<session::Session>(std::move(cfg));
}

} // namespace

auto main(int argc, char** argv) -> int
{
    CLI::App app { "Explore symbolic regression models stored in an e-graph" };
    Options o;
    app.add_option("-d,--dataset", o.dataset, "training data (CSV with header; last column is the target)");
    app.add_option("-t,--test", o.test, "test data used by report");
    app.add_option("--target", o.target, "name of the target column");
    app.add_option("--loss", o.loss, "loss used for fitness: mse or gaussian")->check(CLI::IsMember({ "mse", "gaussian" }));
    app.add_flag("--calculate-dl", o.calculate_dl, "compute the description length of every stored expression");
    app.add_option("--load", o.load, "snapshot to load at startup");
    app.add_option("--import", o.imports, "expression file(s) to import at startup");
    app.add_flag("--parse-parameters", o.parse_parameters, "extract numeric literals of imported expressions as parameters");
    app.add_flag("--serve", o.serve, "run the HTTP/JSON service instead of the prompt");
    app.add_option("--host", o.host, "address the service binds to");
    app.add_option("--port", o.port, "port of the service")->check(CLI::Range(0, 65535));
    app.add_option("--restarts", o.restarts, "fitting restarts for insert and optimize")->check(CLI::Range(1, 10000));
    app.add_option("--seed", o.seed, "seed of the fitting random starts");
    app.add_flag("-q,--quiet", o.quiet, "no prompt and no banner");
    CLI11_PARSE(app, argc, argv);

    std::unique_ptr<egsr::session::Session> session;
    try {
        session = make_session(o);
        if (!o.load.empty()) {
            session->load(o.load);
        }
        for (auto const& path : o.imports) {
            auto r = session->import_file(path, o.parse_parameters);
            std::cerr << fmt::format("imported {} of {} row(s) from {} as {}\n", r.imported, r.rows, path, r.dialect);
            for (auto const& w : r.warnings) {
                std::cerr << "warning: " << w << '\n';
            }
            for (auto const& e : r.errors) {
                std::cerr << "error: " << e << '\n';
            }
        }
        if (o.calculate_dl) {
            session->calculate_all_dl();
        }
    } catch (std::exception const& e) {
        std::cerr << "egsr: " << e.what() << '\n';
        return 1;
    }

    if (o.serve) {
        httplib::Server server;
        egsr::shell::Service service(*session);
        service.bind(server);
        std::cerr << fmt::format("serving on http://{}:{}\n", o.host, o.port);
        if (!server.listen(o.host, o.port)) {
            std::cerr << fmt::format("egsr: cannot listen on {}:{}\n", o.host, o.port);
            return 1;
        }
        return 0;
    }

    bool interactive = isatty(STDIN_FILENO) != 0 && !o.quiet;
    if (interactive) {
        egsr::shell::install_interrupt_handler();
        std::cout << fmt::format("{} expression(s) loaded; type help for the command list\n", session->catalog().size());
    }
    egsr::shell::ReplOptions ro;
    ro.prompt = interactive;
    auto failures = egsr::shell::run_repl(*session, std::cin, std::cout, ro);
    return interactive || failures == 0 ? 0 : 2;
}
