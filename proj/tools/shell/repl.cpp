// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "repl.hpp"

#include <atomic>
#include <csignal>
#include <deque>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace egsr::shell {

namespace {

    std::atomic<bool> g_interrupted { false };

    extern "C" void on_sigint(int /*signal*/) { g_interrupted.store(true); }

    constexpr std::string_view kHelp = R"(commands:
  top N [with (size|cost|parameters) (<|<=|=|>|>=) K]... [by fitness|by dl] [[not] matching [root] PATTERN]
  report ID | subtrees ID | optimize ID [RESTARTS] | simplify ID
  insert EXPRESSION
  pareto [by fitness|by dl]
  count-pattern PATTERN
  distribution [with size (<|<=|=|>|>=) M] [limited at N] (by count|by fitness) [with at least X] [from top Y]
  save PATH | load PATH | import PATH (True|False)
  history | help | quit
)";

    auto trim(std::string const& s) -> std::string
    {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) {
            return {};
        }
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

} // namespace

void install_interrupt_handler()
{
    struct sigaction sa {};
    sa.sa_handler = on_sigint;
    sigemptyset(&sa.sa_mask);
    sa.sa_flags = 0; // no SA_RESTART: a pending read fails with EINTR
    sigaction(SIGINT, &sa, nullptr);
}

auto run_repl(session::Session& s, std::istream& in, std::ostream& out, ReplOptions const& options) -> int
{
    std::deque<std::string> history;
    int failures = 0;
    while (true) {
        if (options.prompt) {
            out << options.prompt_text << std::flush;
        }
        std::string line;
        if (!std::getline(in, line)) {
            if (g_interrupted.exchange(false)) {
                in.clear();
                out << "^C\n";
                continue;
            }
            break;
        }
        g_interrupted.store(false);
        auto text = trim(line);
        if (text.empty() || text.starts_with('#')) {
            continue;
        }
        if (text == "quit" || text == "exit") {
            break;
        }
        if (text == "help") {
            out << kHelp;
            continue;
        }
        if (text == "history") {
            std::size_t n = 0;
            for (auto const& h : history) {
                out << fmt::format("{:>4}  {}\n", ++n, h);
            }
            continue;
        }
        history.push_back(text);
        if (history.size() > options.history_limit) {
            history.pop_front();
        }
        try {
            out << session::format_table(s.run(text));
        } catch (session::CommandError const& e) {
            ++failures;
            auto indent = options.prompt ? options.prompt_text.size() : 0;
            if (!options.prompt) {
                out << text << '\n';
            }
            out << std::string(indent + e.position(), ' ') << "^\n";
            out << "error: " << e.detail() << '\n';
        } catch (std::exception const& e) {
            ++failures;
            out << "error: " << e.what() << '\n';
        }
    }
    return failures;
}

} // namespace egsr::shell
