#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace azr::sandbox {

struct ProcessOptions {
  std::filesystem::path executable;  // absolute, or resolved against PATH
  std::vector<std::string> args;     // argv[1..]
  std::string stdin_data;
  std::vector<std::string> environment;  // "KEY=VALUE"; replaces the parent's
  std::chrono::milliseconds timeout{10'000};
  std::optional<std::filesystem::path> working_dir;
  std::size_t max_output_bytes = 1 << 20;
  std::optional<std::uint64_t> address_space_limit;  // bytes, RLIMIT_AS
};

struct ProcessResult {
  bool spawned = false;     // false when the executable could not be started
  std::string spawn_error;  // set when !spawned
  bool timed_out = false;
  bool output_truncated = false;
  std::optional<int> exit_code;    // absent if killed by a signal
  std::optional<int> term_signal;
  std::string stdout_data;
  std::string stderr_data;
  std::chrono::nanoseconds wall_time{0};
};

/// Runs a child in its own process group. On timeout the whole group gets
/// SIGKILL. Never throws for child-side failures; see ProcessResult.
ProcessResult run_process(const ProcessOptions& options);

/// Looks `name` up on PATH unless it already contains a slash.
std::optional<std::filesystem::path> find_executable(const std::string& name);

/// mkdtemp-backed directory, removed recursively on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "azr");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace azr::sandbox
