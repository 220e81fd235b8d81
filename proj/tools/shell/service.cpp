// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "service.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace egsr::shell {

using nlohmann::json;

namespace {

    auto number(double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); }

    auto error(int status, std::string const& message) -> Reply { return { status, json { { "error", message } } }; }

    void reply(httplib::Response& res, Reply const& r)
    {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    }

} // namespace

auto cell_json(session::Cell const& c) -> json
{
    struct Visitor {
        auto operator()(std::monostate) const -> json { return nullptr; }
        auto operator()(std::int64_t v) const -> json { return v; }
        auto operator()(double v) const -> json { return number(v); }
        auto operator()(std::string const& v) const -> json { return v; }
        auto operator()(std::vector<double> const& v) const -> json
        {
            json a = json::array();
            for (auto x : v) {
                a.push_back(number(x));
            }
            return a;
        }
    };
    return std::visit(Visitor {}, c);
}

auto to_json(session::Table const& t) -> json
{
    json out;
    std::vector<std::string> keys;
    out["columns"] = json::array();
    for (auto const& c : t.columns) {
        keys.push_back(session::column_key(c));
        out["columns"].push_back(keys.back());
    }
    out["rows"] = json::array();
    for (auto const& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < keys.size(); ++i) {
            r[keys[i]] = cell_json(row[i]);
        }
        out["rows"].push_back(std::move(r));
    }
    out["messages"] = t.messages;
    return out;
}

Service::Service(session::Session& s)
    : session_(s)
{
}

auto Service::run_locked(std::string const& text) -> Reply
{
    auto n = ++sequence_;
    log_.push_back(fmt::format("begin {} {}", n, text));
    Reply r;
    try {
        r.body = to_json(session_.run(text));
    } catch (session::CommandError const& e) {
        r = { 400, json { { "error", e.detail() }, { "position", e.position() } } };
    } catch (session::UnknownIdError const& e) {
        r = error(404, e.what());
    } catch (std::exception const& e) {
        r = error(422, e.what());
    }
    log_.push_back(fmt::format("end {}", n));
    return r;
}

auto Service::command(std::string const& text) -> Reply
{
    std::lock_guard lock(mutex_);
    return run_locked(text);
}

auto Service::pareto(std::string const& by) -> Reply
{
    if (by != "fitness" && by != "dl") {
        return error(400, fmt::format("'by' must be fitness or dl, not '{}'", by));
    }
    std::lock_guard lock(mutex_);
    return run_locked("pareto by " + by);
}

auto Service::distribution(std::map<std::string, std::string> const& q) -> Reply
{
    auto get = [&](std::string const& k) -> std::string {
        auto it = q.find(k);
        return it == q.end() ? std::string {} : it->second;
    };
    // The query is rebuilt as command text so both paths share one parser.
    std::string text = "distribution";
    if (auto s = get("size"); !s.empty()) {
        text += " with size " + s;
    }
    if (auto s = get("limit"); !s.empty()) {
        text += " limited at " + s;
    }
    auto by = get("by");
    text += " by " + (by.empty() ? std::string("count") : by);
    if (auto s = get("at_least"); !s.empty()) {
        text += " with at least " + s;
    }
    if (auto s = get("from_top"); !s.empty()) {
        text += " from top " + s;
    }
    std::lock_guard lock(mutex_);
    return run_locked(text);
}

auto Service::expression(std::uint32_t id) -> Reply
{
    std::lock_guard lock(mutex_);
    if (!session_.known(id)) {
        return error(404, fmt::format("unknown id {}", id));
    }
    return run_locked(fmt::format("report {}", id));
}

auto Service::health() -> Reply { return { 200, json { { "status", "ok" } } }; }

auto Service::log() const -> std::vector<std::string>
{
    std::lock_guard lock(mutex_);
    return log_;
}

void Service::bind(httplib::Server& server)
{
    server.Post("/command", [this](httplib::Request const& req, httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("text") || !body["text"].is_string()) {
            reply(res, error(400, "expected a JSON object with a string field 'text'"));
            return;
        }
        reply(res, command(body["text"].get<std::string>()));
    });
    server.Get("/pareto", [this](httplib::Request const& req, httplib::Response& res) {
        reply(res, pareto(req.has_param("by") ? req.get_param_value("by") : "fitness"));
    });
    server.Get("/distribution", [this](httplib::Request const& req, httplib::Response& res) {
        std::map<std::string, std::string> q;
        for (auto const& [k, v] : req.params) {
            q[k] = v;
        }
        reply(res, distribution(q));
    });
    server.Get(R"(/expr/(\d+))", [this](httplib::Request const& req, httplib::Response& res) {
        auto s = req.matches[1].str();
        std::uint32_t id = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
        if (ec != std::errc {} || ptr != s.data() + s.size()) {
            reply(res, error(404, fmt::format("unknown id {}", s)));
            return;
        }
        reply(res, expression(id));
    });
    server.Get("/health", [](httplib::Request const&, httplib::Response& res) { reply(res, health()); });
}

} // namespace egsr::shell
