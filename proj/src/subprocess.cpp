#include "pnas/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>

#include "pnas/errors.hpp"

namespace pnas {
namespace {

// A plugin that exits before reading all of stdin must not kill us.
void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void set_nonblocking(int fd) {
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          std::string_view stdin_data, int timeout_ms) {
  if (argv.empty()) throw Error("run_process: empty argv");
  ignore_sigpipe_once();

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe(in_pipe) || ::pipe(out_pipe) || ::pipe(err_pipe))
    throw Error("run_process: pipe() failed");

  pid_t pid = ::fork();
  if (pid < 0) throw Error("run_process: fork() failed");

  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                   err_pipe[0], err_pipe[1]})
      ::close(fd);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    ::execvp(cargv[0], cargv.data());
    ::dprintf(STDERR_FILENO, "exec %s: %s\n", cargv[0], std::strerror(errno));
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  set_nonblocking(in_pipe[1]);
  set_nonblocking(out_pipe[0]);
  set_nonblocking(err_pipe[0]);

  ProcessResult result;
  std::size_t written = 0;
  bool stdin_open = true, stdout_open = true, stderr_open = true;
  const int64_t deadline = now_ms() + timeout_ms;

  while (stdout_open || stderr_open || stdin_open) {
    int64_t remaining = deadline - now_ms();
    if (remaining <= 0) {
      result.timed_out = true;
      break;
    }
    struct pollfd fds[3];
    int nfds = 0;
    int in_idx = -1, out_idx = -1, err_idx = -1;
    if (stdin_open) {
      in_idx = nfds;
      fds[nfds++] = {in_pipe[1], POLLOUT, 0};
    }
    if (stdout_open) {
      out_idx = nfds;
      fds[nfds++] = {out_pipe[0], POLLIN, 0};
    }
    if (stderr_open) {
      err_idx = nfds;
      fds[nfds++] = {err_pipe[0], POLLIN, 0};
    }
    int rc = ::poll(fds, nfds, static_cast<int>(remaining));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (rc == 0) continue;  // deadline re-checked at loop top

    char buf[4096];
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (written >= stdin_data.size() || (fds[in_idx].revents & (POLLERR | POLLHUP))) {
        ::close(in_pipe[1]);
        stdin_open = false;
      } else {
        ssize_t n = ::write(in_pipe[1], stdin_data.data() + written,
                            stdin_data.size() - written);
        if (n > 0) {
          written += static_cast<std::size_t>(n);
          if (written >= stdin_data.size()) {
            ::close(in_pipe[1]);
            stdin_open = false;
          }
        } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
          ::close(in_pipe[1]);
          stdin_open = false;
        }
      }
    }
    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
      ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
      if (n > 0) result.out.append(buf, static_cast<std::size_t>(n));
      else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
        ::close(out_pipe[0]);
        stdout_open = false;
      }
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) {
      ssize_t n = ::read(err_pipe[0], buf, sizeof buf);
      if (n > 0) result.err.append(buf, static_cast<std::size_t>(n));
      else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
        ::close(err_pipe[0]);
        stderr_open = false;
      }
    }
  }

  if (stdin_open) ::close(in_pipe[1]);
  if (stdout_open) ::close(out_pipe[0]);
  if (stderr_open) ::close(err_pipe[0]);

  if (result.timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (!result.timed_out && WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace pnas
