#include "azr/sandbox/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fmt/format.h>
#include <stdexcept>

#include "azr/core/types.hpp"

namespace azr::sandbox {

namespace {

using Clock = std::chrono::steady_clock;

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  int get() const noexcept { return fd_; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw Error(fmt::format("pipe2 failed: {}", std::strerror(errno)));
  }
  return Pipe{Fd(fds[0]), Fd(fds[1])};
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

[[noreturn]] void child_fail(int report_fd, int err) {
  // Async-signal-safe only: the parent may be multithreaded.
  ssize_t ignored = ::write(report_fd, &err, sizeof(err));
  (void)ignored;
  ::_exit(127);
}

}  // namespace

std::optional<std::filesystem::path> find_executable(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) {
    if (::access(name.c_str(), X_OK) == 0) return std::filesystem::path(name);
    return std::nullopt;
  }
  const char* path_env = std::getenv("PATH");
  std::string paths = path_env ? path_env : "/usr/local/bin:/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= paths.size()) {
    std::size_t end = paths.find(':', start);
    if (end == std::string::npos) end = paths.size();
    std::string dir = paths.substr(start, end - start);
    if (!dir.empty()) {
      std::filesystem::path candidate = std::filesystem::path(dir) / name;
      if (::access(candidate.c_str(), X_OK) == 0) return candidate;
    }
    start = end + 1;
  }
  return std::nullopt;
}

TempDir::TempDir(const std::string& prefix) {
  std::string pattern = (std::filesystem::temp_directory_path() / (prefix + "-XXXXXX")).string();
  if (::mkdtemp(pattern.data()) == nullptr) {
    throw Error(fmt::format("mkdtemp failed: {}", std::strerror(errno)));
  }
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

ProcessResult run_process(const ProcessOptions& options) {
  ProcessResult result;
  auto executable = find_executable(options.executable.string());
  if (!executable) {
    result.spawn_error = fmt::format("executable '{}' not found", options.executable.string());
    return result;
  }

  // Everything the child touches is prepared before fork.
  std::vector<std::string> argv_storage;
  argv_storage.push_back(executable->string());
  argv_storage.insert(argv_storage.end(), options.args.begin(), options.args.end());
  std::vector<char*> argv;
  for (auto& arg : argv_storage) argv.push_back(arg.data());
  argv.push_back(nullptr);
  std::vector<std::string> env_storage = options.environment;
  std::vector<char*> envp;
  for (auto& var : env_storage) envp.push_back(var.data());
  envp.push_back(nullptr);
  std::string workdir = options.working_dir ? options.working_dir->string() : std::string();

  Pipe in = make_pipe();
  Pipe out = make_pipe();
  Pipe err = make_pipe();
  Pipe report = make_pipe();

  const auto start = Clock::now();
  pid_t pid = ::fork();
  if (pid < 0) {
    result.spawn_error = fmt::format("fork failed: {}", std::strerror(errno));
    return result;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    if (::dup2(in.read.get(), STDIN_FILENO) < 0 || ::dup2(out.write.get(), STDOUT_FILENO) < 0 ||
        ::dup2(err.write.get(), STDERR_FILENO) < 0) {
      child_fail(report.write.get(), errno);
    }
    if (options.address_space_limit) {
      rlimit limit{*options.address_space_limit, *options.address_space_limit};
      ::setrlimit(RLIMIT_AS, &limit);
    }
    rlimit no_core{0, 0};
    ::setrlimit(RLIMIT_CORE, &no_core);
    if (!workdir.empty() && ::chdir(workdir.c_str()) != 0) child_fail(report.write.get(), errno);
    ::execve(argv[0], argv.data(), envp.data());
    child_fail(report.write.get(), errno);
  }
  ::setpgid(pid, pid);

  in.read.reset();
  out.write.reset();
  err.write.reset();
  report.write.reset();

  int exec_errno = 0;
  ssize_t got = ::read(report.read.get(), &exec_errno, sizeof(exec_errno));
  if (got == static_cast<ssize_t>(sizeof(exec_errno))) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    result.spawn_error = fmt::format("exec of {} failed: {}", argv_storage[0], std::strerror(exec_errno));
    return result;
  }
  result.spawned = true;

  set_nonblocking(in.write.get());
  set_nonblocking(out.read.get());
  set_nonblocking(err.read.get());
  std::size_t written = 0;
  if (options.stdin_data.empty()) in.write.reset();

  const auto deadline = start + options.timeout;
  char chunk[8192];
  while (out.read.get() >= 0 || err.read.get() >= 0) {
    auto now = Clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;

    pollfd fds[3];
    int count = 0;
    int out_slot = -1, err_slot = -1, in_slot = -1;
    if (out.read.get() >= 0) { out_slot = count; fds[count++] = {out.read.get(), POLLIN, 0}; }
    if (err.read.get() >= 0) { err_slot = count; fds[count++] = {err.read.get(), POLLIN, 0}; }
    if (in.write.get() >= 0) { in_slot = count; fds[count++] = {in.write.get(), POLLOUT, 0}; }
    int ready = ::poll(fds, count, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    auto drain = [&](int slot, Fd& fd, std::string& sink) {
      if (slot < 0 || !(fds[slot].revents & (POLLIN | POLLHUP | POLLERR))) return;
      ssize_t n = ::read(fd.get(), chunk, sizeof(chunk));
      if (n > 0) {
        std::size_t room = options.max_output_bytes > sink.size() ? options.max_output_bytes - sink.size() : 0;
        if (static_cast<std::size_t>(n) > room) result.output_truncated = true;
        sink.append(chunk, std::min<std::size_t>(room, static_cast<std::size_t>(n)));
      } else if (n == 0 || (errno != EAGAIN && errno != EINTR)) {
        fd.reset();
      }
    };
    drain(out_slot, out.read, result.stdout_data);
    drain(err_slot, err.read, result.stderr_data);
    if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = ::write(in.write.get(), options.stdin_data.data() + written,
                          options.stdin_data.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if ((n < 0 && errno != EAGAIN && errno != EINTR) || written == options.stdin_data.size()) {
        in.write.reset();
      }
    }
    if (result.output_truncated) break;
  }

  if (result.timed_out || result.output_truncated) ::kill(-pid, SIGKILL);
  int status = 0;
  // The child may close its pipes and keep running, so the wait is bounded too.
  while (true) {
    pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid || (done < 0 && errno != EINTR)) break;
    if (Clock::now() >= deadline) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      break;
    }
    ::usleep(1000);
  }
  // Stray grandchildren must not outlive the call.
  ::kill(-pid, SIGKILL);
  result.wall_time = Clock::now() - start;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) result.term_signal = WTERMSIG(status);
  return result;
}

}  // namespace azr::sandbox
