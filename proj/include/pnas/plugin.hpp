#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace pnas {

// External evaluator invoked as a child process: one JSON object + newline on
// stdin, one JSON object + newline on stdout, exit code 0. No shell is
// involved; argv is passed to execvp directly.
struct PluginCommand {
  std::vector<std::string> argv;
  int timeout_ms = 0;  // 0 means "use default_plugin_timeout_ms()"
};

// PARETO_NAS_PLUGIN_TIMEOUT_MS overrides the built-in 60000ms default.
int default_plugin_timeout_ms();

// Runs the plugin once and returns its parsed reply.
// Throws PluginFailure on spawn failure, nonzero exit, timeout, or a reply
// that is not a single JSON object; the message carries a stderr excerpt.
nlohmann::json call_plugin(const PluginCommand& cmd, const nlohmann::json& input);

}  // namespace pnas
