// Copyright 2026 The SeedForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seedforge/subprocess.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <string_view>

#include "absl/status/status.h"
#include "fmt/format.h"
#include "seedforge/strings.h"

extern char **environ;

namespace seedforge {
namespace {

void CloseIfOpen(int &fd) {
  if (fd >= 0) close(fd);
  fd = -1;
}

}  // namespace

std::string FindExecutable(const std::string &program) {
  auto executable = [](const std::string &path) {
    struct stat st;
    return stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) &&
           access(path.c_str(), X_OK) == 0;
  };
  if (program.find('/') != std::string::npos) {
    return executable(program) ? program : "";
  }
  const char *path_env = std::getenv("PATH");
  for (std::string_view dir : Split(path_env ? path_env : "/usr/bin:/bin", ':')) {
    std::string candidate =
        std::string(dir.empty() ? "." : dir) + "/" + program;
    if (executable(candidate)) return candidate;
  }
  return "";
}

absl::StatusOr<SubprocessResult> RunSubprocess(
    const SubprocessOptions &options) {
  if (options.argv.empty()) return absl::InvalidArgumentError("empty argv");
  // A child that stops reading stdin must not kill us.
  static const bool sigpipe_ignored = [] {
    signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;
  const std::string binary = FindExecutable(options.argv[0]);
  if (binary.empty()) {
    return absl::NotFoundError(
        fmt::format("executable not found: {}", options.argv[0]));
  }

  // Everything the child needs is prepared before fork.
  std::vector<char *> argv;
  for (const std::string &arg : options.argv) {
    argv.push_back(const_cast<char *>(arg.c_str()));
  }
  argv.push_back(nullptr);
  std::vector<std::string> env_storage;
  for (char **e = environ; *e != nullptr; ++e) {
    std::string_view entry(*e);
    const std::string name(entry.substr(0, entry.find('=')));
    if (!options.env.contains(name)) env_storage.emplace_back(entry);
  }
  for (const auto &[name, value] : options.env) {
    env_storage.push_back(name + "=" + value);
  }
  std::vector<char *> envp;
  for (std::string &entry : env_storage) envp.push_back(entry.data());
  envp.push_back(nullptr);

  int in_pipe[2] = {-1, -1}, out_pipe[2] = {-1, -1}, err_pipe[2] = {-1, -1};
  if (options.stdin_data && pipe2(in_pipe, O_CLOEXEC) != 0) {
    return absl::InternalError("pipe failed");
  }
  if (options.capture_output && pipe2(out_pipe, O_CLOEXEC) != 0) {
    return absl::InternalError("pipe failed");
  }
  if (pipe2(err_pipe, O_CLOEXEC) != 0) return absl::InternalError("pipe failed");

  const pid_t pid = fork();
  if (pid < 0) return absl::InternalError("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    signal(SIGPIPE, SIG_DFL);
    int devnull = open("/dev/null", O_RDWR);
    dup2(options.stdin_data ? in_pipe[0] : devnull, 0);
    dup2(options.capture_output ? out_pipe[1] : devnull, 1);
    dup2(options.capture_output ? out_pipe[1] : devnull, 2);
    if (!options.cwd.empty() && chdir(options.cwd.c_str()) != 0) {
      const int err = errno;
      (void)!write(err_pipe[1], &err, sizeof(err));
      _exit(127);
    }
    execve(binary.c_str(), argv.data(), envp.data());
    const int err = errno;
    (void)!write(err_pipe[1], &err, sizeof(err));
    _exit(127);
  }
  setpgid(pid, pid);
  CloseIfOpen(in_pipe[0]);
  CloseIfOpen(out_pipe[1]);
  CloseIfOpen(err_pipe[1]);

  int exec_errno = 0;
  if (read(err_pipe[0], &exec_errno, sizeof(exec_errno)) !=
      static_cast<ssize_t>(sizeof(exec_errno))) {
    exec_errno = 0;
  }
  CloseIfOpen(err_pipe[0]);

  SubprocessResult result;
  const Clock::time_point start = Clock::now();
  size_t written = 0;
  if (in_pipe[1] >= 0) fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  if (options.stdin_data && options.stdin_data->empty()) CloseIfOpen(in_pipe[1]);
  bool exited = false;
  int status = 0;
  while (!exited) {
    pollfd fds[2];
    int nfds = 0;
    if (out_pipe[0] >= 0) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (in_pipe[1] >= 0) fds[nfds++] = {in_pipe[1], POLLOUT, 0};
    if (nfds > 0) {
      poll(fds, nfds, 20);
    } else {
      usleep(2000);
    }
    for (int i = 0; i < nfds; ++i) {
      if (fds[i].fd == out_pipe[0] && (fds[i].revents & (POLLIN | POLLHUP))) {
        char buf[8192];
        const ssize_t n = read(out_pipe[0], buf, sizeof(buf));
        if (n <= 0) {
          CloseIfOpen(out_pipe[0]);
        } else if (result.output.size() < options.max_output_bytes) {
          result.output.append(
              buf, std::min<size_t>(n, options.max_output_bytes -
                                           result.output.size()));
        }
      } else if (fds[i].fd == in_pipe[1] &&
                 (fds[i].revents & (POLLOUT | POLLERR | POLLHUP))) {
        const std::string &data = *options.stdin_data;
        const ssize_t n =
            write(in_pipe[1], data.data() + written, data.size() - written);
        if (n > 0) written += n;
        if (n < 0 && errno != EAGAIN) written = data.size();
        if (written >= data.size()) CloseIfOpen(in_pipe[1]);
      }
    }
    const pid_t w = waitpid(pid, &status, WNOHANG);
    if (w == pid) {
      exited = true;
      break;
    }
    bool kill_now = false;
    if (options.timeout.count() > 0 && Clock::now() - start >= options.timeout) {
      result.timed_out = true;
      kill_now = true;
    }
    if (options.budget != nullptr && options.budget->Exhausted()) kill_now = true;
    if (options.keep_running && !options.keep_running()) kill_now = true;
    if (kill_now) {
      result.killed = true;
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      exited = true;
    }
  }
  // Drain what is left (the child may have exited with data buffered).
  while (out_pipe[0] >= 0) {
    char buf[8192];
    pollfd fd = {out_pipe[0], POLLIN, 0};
    if (poll(&fd, 1, 50) <= 0) break;
    const ssize_t n = read(out_pipe[0], buf, sizeof(buf));
    if (n <= 0) break;
    if (result.output.size() < options.max_output_bytes) {
      result.output.append(
          buf, std::min<size_t>(n, options.max_output_bytes -
                                       result.output.size()));
    }
  }
  CloseIfOpen(out_pipe[0]);
  CloseIfOpen(in_pipe[1]);
  // Reap any grandchildren left in the group.
  if (!result.killed) kill(-pid, SIGKILL);

  if (exec_errno != 0) {
    return absl::NotFoundError(fmt::format("cannot execute {}: {}",
                                           options.argv[0],
                                           std::strerror(exec_errno)));
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.term_signal = WTERMSIG(status);
  }
  return result;
}

}  // namespace seedforge
