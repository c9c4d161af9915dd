#include "specverify/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "specverify/error.hpp"

namespace specverify {

namespace {

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) fail(ErrorCode::IoError, std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() { close_both(); }
  void close_read() { if (fd[0] >= 0) { ::close(fd[0]); fd[0] = -1; } }
  void close_write() { if (fd[1] >= 0) { ::close(fd[1]); fd[1] = -1; } }
  void close_both() { close_read(); close_write(); }
};

bool is_executable(const std::filesystem::path& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

void drain(int fd, std::string& out) {
  char buf[4096];
  while (true) {
    auto n = ::read(fd, buf, sizeof buf);
    if (n > 0) {
      out.append(buf, static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    break;
  }
}

}  // namespace

std::optional<std::filesystem::path> find_executable(std::string_view name) {
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string_view::npos) {
    std::filesystem::path p(name);
    if (is_executable(p)) return std::filesystem::absolute(p);
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  std::string_view dirs = path ? path : "/usr/local/bin:/usr/bin:/bin";
  while (!dirs.empty()) {
    auto colon = dirs.find(':');
    auto dir = dirs.substr(0, colon);
    auto candidate = std::filesystem::path(dir.empty() ? "." : std::string(dir)) / std::string(name);
    if (is_executable(candidate)) return candidate;
    if (colon == std::string_view::npos) break;
    dirs.remove_prefix(colon + 1);
  }
  return std::nullopt;
}

ProcessResult run_process(const std::vector<std::string>& argv, Seconds timeout,
                          const std::filesystem::path& cwd, Seconds grace) {
  require(!argv.empty(), "run_process: empty argv");
  using clock = std::chrono::steady_clock;

  Pipe out;
  Pipe exec_status;  // carries errno if exec fails
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const auto start = clock::now();
  pid_t pid = ::fork();
  if (pid < 0) fail(ErrorCode::IoError, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out.fd[1], STDOUT_FILENO);
    ::dup2(out.fd[1], STDERR_FILENO);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) {
      int e = errno;
      (void)!::write(exec_status.fd[1], &e, sizeof e);
      ::_exit(127);
    }
    ::execvp(args[0], args.data());
    int e = errno;
    (void)!::write(exec_status.fd[1], &e, sizeof e);
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  out.close_write();
  exec_status.close_write();

  int child_errno = 0;
  if (::read(exec_status.fd[0], &child_errno, sizeof child_errno) == sizeof child_errno) {
    ::waitpid(pid, nullptr, 0);
    fail(ErrorCode::ToolNotFound, argv[0] + ": " + std::strerror(child_errno));
  }

  ProcessResult result;
  ::fcntl(out.fd[0], F_SETFL, ::fcntl(out.fd[0], F_GETFL) | O_NONBLOCK);
  const auto deadline = start + std::chrono::duration_cast<clock::duration>(timeout);
  const auto kill_at = deadline + std::chrono::duration_cast<clock::duration>(grace);
  bool term_sent = false, kill_sent = false, pipe_open = true;
  int status = 0;

  while (true) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    auto now = clock::now();
    if (!term_sent && now >= deadline) {
      result.timed_out = true;
      ::kill(-pid, SIGTERM);
      term_sent = true;
    }
    if (term_sent && !kill_sent && now >= kill_at) {
      ::kill(-pid, SIGKILL);
      kill_sent = true;
    }
    if (pipe_open) {
      pollfd p{out.fd[0], POLLIN, 0};
      if (::poll(&p, 1, 20) > 0) {
        char buf[4096];
        auto n = ::read(out.fd[0], buf, sizeof buf);
        if (n > 0) result.output.append(buf, static_cast<std::size_t>(n));
        else if (n == 0) pipe_open = false;
      }
    } else {
      ::usleep(20000);
    }
  }
  // Stragglers in the group must not outlive the call.
  ::kill(-pid, SIGKILL);
  if (pipe_open) drain(out.fd[0], result.output);

  result.wall_time = clock::now() - start;
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.term_signal = WTERMSIG(status);
  }
  return result;
}

}  // namespace specverify
