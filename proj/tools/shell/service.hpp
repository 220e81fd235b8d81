// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_SHELL_SERVICE_HPP
#define EGSR_SHELL_SERVICE_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

// Eigen before httplib: <resolv.h> defines a `_res` macro.
#include "egsr/session/session.hpp"

#include <httplib.h>
#include <json.hpp>

namespace egsr::shell {

// {"columns": [...], "rows": [{key: value}], "messages": [...]}; keys are
// the lower-cased column titles, non-finite numbers become null.
auto to_json(session::Table const& t) -> nlohmann::json;
auto cell_json(session::Cell const& c) -> nlohmann::json;

struct Reply {
    int status { 200 };
    nlohmann::json body;
};

// Serializes every request onto one session. Each executed command leaves a
// "begin <n> <text>" and "end <n>" line in the log.
class Service {
public:
    explicit Service(session::Session& s);

    auto command(std::string const& text) -> Reply;
    auto pareto(std::string const& by) -> Reply;
    auto distribution(std::map<std::string, std::string> const& query) -> Reply;
    auto expression(std::uint32_t id) -> Reply;
    static auto health() -> Reply;

    [[nodiscard]] auto log() const -> std::vector<std::string>;

    // Registers every endpoint on `server`.
    void bind(httplib::Server& server);

private:
    auto run_locked(std::string const& text) -> Reply;

    session::Session& session_;
    mutable std::mutex mutex_;
    std::vector<std::string> log_;
    std::uint64_t sequence_ { 0 };
};

} // namespace egsr::shell

#endif
