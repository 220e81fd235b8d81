// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_SHELL_REPL_HPP
#define EGSR_SHELL_REPL_HPP

#include <iosfwd>
#include <string>

#include "egsr/session/session.hpp"

namespace egsr::shell {

struct ReplOptions {
    bool prompt { true };
    std::string prompt_text { "egsr> " };
    std::size_t history_limit { 1000 };
};

// Reads one command per line until EOF, "quit" or "exit". Besides the
// session commands it understands "history" and "help". Errors are printed
// with a caret under the offending position and the loop continues.
// Returns the number of commands that failed.
auto run_repl(session::Session& s, std::istream& in, std::ostream& out, ReplOptions const& options = {}) -> int;

// Installs a SIGINT handler that makes a blocked read return, so the loop
// can drop the current line instead of exiting.
void install_interrupt_handler();

} // namespace egsr::shell

#endif
