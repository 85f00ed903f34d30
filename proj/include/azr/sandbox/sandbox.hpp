#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "azr/sandbox/driver_template.hpp"

namespace azr::sandbox {

/// Raised when the interpreter or harness files cannot be used at all.
class HarnessError : public Error {
 public:
  using Error::Error;
};

enum class OutcomeStatus { Ok, RaisedError, Timeout, HarnessFailure };

std::string_view to_string(OutcomeStatus status);

struct ExecutionOutcome {
  OutcomeStatus status = OutcomeStatus::HarnessFailure;
  std::optional<std::string> value;        // iff Ok
  std::optional<std::string> error_class;  // iff RaisedError
  std::string detail;                      // error message or harness diagnostic
  std::chrono::nanoseconds wall_time{0};
  // Interpreter missing or harness file unreadable, as opposed to a
  // misbehaving program that garbled the protocol.
  bool harness_unavailable = false;

  bool ok() const noexcept { return status == OutcomeStatus::Ok; }
};

struct SafetyVerdict {
  bool safe = true;
  std::vector<std::string> offending;
  bool syntax_tree = true;  // false when the textual fallback was used
};

struct DeterminismVerdict {
  bool deterministic = false;
  std::optional<std::string> output;
  ExecutionOutcome outcome;
};

enum class CheckState { Pass, Fail, Skipped };

std::string_view to_string(CheckState state);

/// Result of the full task validation pipeline.
struct ValidationVerdict {
  CheckState safety = CheckState::Skipped;
  CheckState integrity = CheckState::Skipped;
  CheckState determinism = CheckState::Skipped;
  std::vector<std::string> offending;
  std::optional<std::string> output;  // iff every check passed
  std::string diagnostic;

  bool passed() const noexcept { return output.has_value(); }
};

/// Default forbidden names: modules and attribute paths a task program may
/// not reference.
const std::vector<std::string>& default_forbidden_modules();

struct SandboxConfig {
  std::filesystem::path python = "python3";
  std::filesystem::path harness_dir = AZR_DEFAULT_HARNESS_DIR;
  std::chrono::milliseconds timeout{10'000};
  std::size_t workers = 4;
  int determinism_runs = 2;
  std::vector<std::string> forbidden = default_forbidden_modules();
  std::optional<std::uint64_t> address_space_limit = std::uint64_t{1} << 30;
  std::vector<std::string> env_allowlist = {"PATH", "LANG", "LC_ALL", "LC_CTYPE"};
};

/// Runs task-language programs in fresh interpreter subprocesses.
///
/// Every call spawns `python runner.py` (or `ast_tool.py`) with the rendered
/// driver on stdin and reads a single `OK <repr>` / `ERR <class>: <msg>`
/// line back. At most `workers` subprocesses run at once; callers on other
/// threads block until a slot frees up.
class Sandbox {
 public:
  explicit Sandbox(SandboxConfig config = {});

  const SandboxConfig& config() const noexcept { return config_; }
  const DriverTemplates& templates() const noexcept { return templates_; }

  /// Runs an already-rendered driver script.
  ExecutionOutcome run_script(const std::string& script,
                              std::optional<std::chrono::milliseconds> timeout = {}) const;

  /// Evaluates repr(f(input)).
  ExecutionOutcome execute(const std::string& program, const std::string& input,
                           std::optional<std::chrono::milliseconds> timeout = {}) const;

  /// Static check against the forbidden list. Never executes the program.
  SafetyVerdict check_safety(const std::string& program) const;

  /// Static check of an argument list, scanned as the call `f(input)`.
  /// Inputs are evaluated as code by every driver, so they get the same
  /// filter as programs, and must not close the call to splice in other
  /// expressions.
  SafetyVerdict check_input_safety(const std::string& input) const;

  /// Evaluates f(input) `runs` times in one process and compares by value.
  DeterminismVerdict check_determinism(const std::string& program, const std::string& input,
                                       int runs = 2,
                                       std::optional<std::chrono::milliseconds> timeout = {}) const;

  /// Integrity then determinism, without the safety scan. For callers that
  /// already scanned the program (one program, many inputs).
  ValidationVerdict validate_execution(const std::string& program, const std::string& input,
                                       std::optional<std::chrono::milliseconds> timeout = {}) const;

  /// Safety (program and input), then integrity, then determinism; stops at
  /// the first failure.
  ValidationVerdict validate_and_construct(const std::string& program, const std::string& input,
                                           std::optional<std::chrono::milliseconds> timeout = {}) const;

  /// Runs a harness analysis mode (names, strip, dump, tokens, comments)
  /// over `source`. Returns the decoded JSON, or nullopt with `error` set.
  std::optional<nlohmann::json> analyze(std::string_view mode, const std::string& source,
                                        std::string* error = nullptr) const;

  /// Throws HarnessError if the interpreter or harness is unusable.
  void self_check() const;

 private:
  ExecutionOutcome run_python(const std::filesystem::path& script_file,
                              std::vector<std::string> args, const std::string& stdin_data,
                              std::chrono::milliseconds timeout) const;

  SandboxConfig config_;
  DriverTemplates templates_;
  std::vector<std::string> environment_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

/// Matches referenced dotted names against a forbidden list: an entry `a.b`
/// matches `a.b` and anything below it (`a.b.c`).
std::vector<std::string> forbidden_matches(const std::vector<std::string>& referenced,
                                           const std::vector<std::string>& forbidden);

/// Word-boundary textual scan used when the program does not parse.
std::vector<std::string> forbidden_textual(std::string_view source,
                                           const std::vector<std::string>& forbidden);

}  // namespace azr::sandbox
