#include "pnas/plugin.hpp"

#include <cstdlib>
#include <sstream>

#include "pnas/errors.hpp"
#include "pnas/subprocess.hpp"

namespace pnas {

namespace {

std::string excerpt(const std::string& s, std::size_t limit = 500) {
  if (s.size() <= limit) return s;
  return s.substr(0, limit) + "...";
}

std::string joined_argv(const std::vector<std::string>& argv) {
  std::ostringstream os;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    if (i) os << ' ';
    os << argv[i];
  }
  return os.str();
}

}  // namespace

int default_plugin_timeout_ms() {
  const char* env = std::getenv("PARETO_NAS_PLUGIN_TIMEOUT_MS");
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 60000;
}

nlohmann::json call_plugin(const PluginCommand& cmd, const nlohmann::json& input) {
  if (cmd.argv.empty()) throw PluginFailure("plugin command is empty");
  int timeout = cmd.timeout_ms > 0 ? cmd.timeout_ms : default_plugin_timeout_ms();
  ProcessResult res = run_process(cmd.argv, input.dump() + "\n", timeout);
  const std::string name = joined_argv(cmd.argv);
  if (res.timed_out) {
    throw PluginFailure("plugin [" + name + "] timed out after " + std::to_string(timeout) +
                        "ms; stderr: " + excerpt(res.err));
  }
  if (res.exit_code != 0) {
    throw PluginFailure("plugin [" + name + "] exited with code " + std::to_string(res.exit_code) +
                        "; stderr: " + excerpt(res.err));
  }
  nlohmann::json reply = nlohmann::json::parse(res.out, nullptr, false);
  if (reply.is_discarded() || !reply.is_object()) {
    throw PluginFailure("plugin [" + name + "] reply is not a single JSON object; stdout: " +
                        excerpt(res.out) + "; stderr: " + excerpt(res.err));
  }
  return reply;
}

}  // namespace pnas
