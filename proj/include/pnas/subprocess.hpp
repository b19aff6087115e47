#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pnas {

struct ProcessResult {
  int exit_code = -1;      // -1 when killed by signal or timed out
  bool timed_out = false;
  std::string out;
  std::string err;
};

// Runs argv[0] with the given arguments (execvp, no shell), feeding
// stdin_data on stdin and capturing both output streams. On timeout the
// child is killed with SIGKILL and timed_out is set. Throws Error when the
// process cannot be spawned at all.
ProcessResult run_process(const std::vector<std::string>& argv,
                          std::string_view stdin_data, int timeout_ms);

}  // namespace pnas
