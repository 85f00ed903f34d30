#include "azr/sandbox/sandbox.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>

#include "azr/sandbox/process.hpp"

namespace azr::sandbox {

namespace {

constexpr std::string_view kRunner = "runner.py";
constexpr std::string_view kAstTool = "ast_tool.py";

bool is_identifier_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string tail(const std::string& text, std::size_t n = 400) {
  return text.size() <= n ? text : text.substr(text.size() - n);
}

ExecutionOutcome parse_protocol(const ProcessResult& proc) {
  ExecutionOutcome outcome;
  outcome.wall_time = proc.wall_time;
  if (proc.timed_out) {
    outcome.status = OutcomeStatus::Timeout;
    outcome.detail = "wall-clock timeout";
    return outcome;
  }
  outcome.status = OutcomeStatus::HarnessFailure;
  if (proc.output_truncated) {
    outcome.detail = "protocol output exceeded the capture limit";
    return outcome;
  }
  if (!proc.exit_code || *proc.exit_code != 0) {
    outcome.detail = proc.term_signal ? fmt::format("interpreter killed by signal {}", *proc.term_signal)
                                      : fmt::format("interpreter exited with status {}: {}",
                                                    proc.exit_code.value_or(-1), tail(proc.stderr_data));
    return outcome;
  }
  std::string_view out = proc.stdout_data;
  if (out.empty() || out.back() != '\n' || out.find('\n') != out.size() - 1) {
    outcome.detail = fmt::format("malformed protocol output: '{}'", tail(proc.stdout_data));
    return outcome;
  }
  out.remove_suffix(1);
  if (out.starts_with("OK ") && out.size() > 3) {
    outcome.status = OutcomeStatus::Ok;
    outcome.value = std::string(out.substr(3));
  } else if (out.starts_with("ERR ")) {
    std::string_view body = out.substr(4);
    std::size_t colon = body.find(':');
    outcome.status = OutcomeStatus::RaisedError;
    outcome.error_class = std::string(body.substr(0, colon));
    outcome.detail = colon == std::string_view::npos ? std::string() : std::string(body.substr(colon + 1));
    if (!outcome.detail.empty() && outcome.detail.front() == ' ') outcome.detail.erase(0, 1);
  } else {
    outcome.detail = fmt::format("malformed protocol line: '{}'", tail(proc.stdout_data));
  }
  return outcome;
}

SandboxConfig normalized(SandboxConfig config) {
  // Subprocesses run in a scratch directory, so relative paths would break.
  config.harness_dir = std::filesystem::absolute(config.harness_dir);
  if (config.python.has_parent_path()) config.python = std::filesystem::absolute(config.python);
  return config;
}

}  // namespace

std::string_view to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::Ok:
      return "ok";
    case OutcomeStatus::RaisedError:
      return "raised_error";
    case OutcomeStatus::Timeout:
      return "timeout";
    case OutcomeStatus::HarnessFailure:
      return "harness_failure";
  }
  return "unknown";
}

std::string_view to_string(CheckState state) {
  switch (state) {
    case CheckState::Pass:
      return "pass";
    case CheckState::Fail:
      return "fail";
    case CheckState::Skipped:
      return "skipped";
  }
  return "unknown";
}

const std::vector<std::string>& default_forbidden_modules() {
  static const std::vector<std::string> modules = {
      "logging",  "random",  "multiprocessing", "pebble",  "subprocess", "threading", "datetime", "time",
      "hashlib",  "calendar", "bcrypt",         "os.sys",  "os.path",    "sys.exit",  "os.environ"};
  return modules;
}

std::vector<std::string> forbidden_matches(const std::vector<std::string>& referenced,
                                           const std::vector<std::string>& forbidden) {
  std::vector<std::string> hits;
  for (const auto& entry : forbidden) {
    bool hit = std::any_of(referenced.begin(), referenced.end(), [&](const std::string& name) {
      return name == entry || (name.size() > entry.size() && name.starts_with(entry) &&
                               name[entry.size()] == '.');
    });
    if (hit) hits.push_back(entry);
  }
  return hits;
}

std::vector<std::string> forbidden_textual(std::string_view source,
                                           const std::vector<std::string>& forbidden) {
  std::vector<std::string> hits;
  for (const auto& entry : forbidden) {
    std::size_t pos = source.find(entry);
    while (pos != std::string_view::npos) {
      bool left_ok = pos == 0 || (!is_identifier_char(source[pos - 1]) && source[pos - 1] != '.');
      std::size_t end = pos + entry.size();
      bool right_ok = end >= source.size() || !is_identifier_char(source[end]);
      if (left_ok && right_ok) {
        hits.push_back(entry);
        break;
      }
      pos = source.find(entry, pos + 1);
    }
  }
  return hits;
}

Sandbox::Sandbox(SandboxConfig config)
    : config_(normalized(std::move(config))),
      templates_(config_.harness_dir),
      slots_(std::make_unique<std::counting_semaphore<>>(
          static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, config_.workers)))) {
  for (const auto& name : config_.env_allowlist) {
    if (const char* value = std::getenv(name.c_str())) environment_.push_back(name + "=" + value);
  }
  // Fixed hash seed keeps set/dict reprs identical across interpreter runs.
  environment_.push_back("PYTHONHASHSEED=0");
  environment_.push_back("PYTHONDONTWRITEBYTECODE=1");
  environment_.push_back("PYTHONIOENCODING=utf-8");
}

ExecutionOutcome Sandbox::run_python(const std::filesystem::path& script_file,
                                     std::vector<std::string> args, const std::string& stdin_data,
                                     std::chrono::milliseconds timeout) const {
  ProcessOptions options;
  options.executable = config_.python;
  options.args = {"-s", "-B", script_file.string()};
  options.args.insert(options.args.end(), args.begin(), args.end());
  options.stdin_data = stdin_data;
  options.environment = environment_;
  options.timeout = timeout;
  options.address_space_limit = config_.address_space_limit;

  slots_->acquire();
  ProcessResult proc;
  try {
    TempDir workdir("azr-sandbox");
    options.working_dir = workdir.path();
    proc = run_process(options);
  } catch (...) {
    slots_->release();
    throw;
  }
  slots_->release();

  if (!proc.spawned) {
    ExecutionOutcome outcome;
    outcome.status = OutcomeStatus::HarnessFailure;
    outcome.harness_unavailable = true;
    outcome.detail = proc.spawn_error;
    return outcome;
  }
  auto outcome = parse_protocol(proc);
  // A missing runner shows up as "can't open file" on stderr with status 2.
  if (outcome.status == OutcomeStatus::HarnessFailure &&
      proc.stderr_data.find("can't open file") != std::string::npos) {
    outcome.harness_unavailable = true;
  }
  return outcome;
}

ExecutionOutcome Sandbox::run_script(const std::string& script,
                                     std::optional<std::chrono::milliseconds> timeout) const {
  return run_python(config_.harness_dir / kRunner, {}, script, timeout.value_or(config_.timeout));
}

ExecutionOutcome Sandbox::execute(const std::string& program, const std::string& input,
                                  std::optional<std::chrono::milliseconds> timeout) const {
  std::string script =
      templates_.get(DriverKind::Validate).render({{"code", program}, {"inputs", input}});
  return run_script(script, timeout);
}

std::optional<nlohmann::json> Sandbox::analyze(std::string_view mode, const std::string& source,
                                               std::string* error) const {
  auto outcome = run_python(config_.harness_dir / kAstTool, {std::string(mode)}, source, config_.timeout);
  if (outcome.harness_unavailable) throw HarnessError(outcome.detail);
  if (!outcome.ok()) {
    if (error) *error = outcome.error_class ? *outcome.error_class + ": " + outcome.detail : outcome.detail;
    return std::nullopt;
  }
  try {
    return nlohmann::json::parse(*outcome.value);
  } catch (const nlohmann::json::parse_error& e) {
    if (error) *error = e.what();
    return std::nullopt;
  }
}

SafetyVerdict Sandbox::check_safety(const std::string& program) const {
  SafetyVerdict verdict;
  std::string error;
  auto names = analyze("names", program, &error);
  if (names && names->is_array()) {
    verdict.offending = forbidden_matches(names->get<std::vector<std::string>>(), config_.forbidden);
  } else {
    verdict.syntax_tree = false;
    verdict.offending = forbidden_textual(program, config_.forbidden);
  }
  verdict.safe = verdict.offending.empty();
  return verdict;
}

SafetyVerdict Sandbox::check_input_safety(const std::string& input) const {
  SafetyVerdict verdict;
  std::string error;
  auto names = analyze("call", input, &error);
  if (names && names->is_array()) {
    verdict.offending = forbidden_matches(names->get<std::vector<std::string>>(), config_.forbidden);
  } else if (error.starts_with("ValueError")) {
    // Parses, but closes the call early to splice in other code.
    verdict.offending = {"<argument list escapes the call>"};
  } else {
    verdict.syntax_tree = false;
    verdict.offending = forbidden_textual(input, config_.forbidden);
  }
  verdict.safe = verdict.offending.empty();
  return verdict;
}

DeterminismVerdict Sandbox::check_determinism(const std::string& program, const std::string& input,
                                              int runs,
                                              std::optional<std::chrono::milliseconds> timeout) const {
  if (runs < 2) throw Error("determinism check needs at least two runs");
  std::string script = templates_.get(DriverKind::Determinism)
                           .render({{"code", program}, {"inputs", input}, {"runs", std::to_string(runs)}});
  DeterminismVerdict verdict;
  verdict.outcome = run_script(script, timeout);
  verdict.deterministic = verdict.outcome.ok();
  if (verdict.deterministic) verdict.output = verdict.outcome.value;
  return verdict;
}

ValidationVerdict Sandbox::validate_and_construct(const std::string& program, const std::string& input,
                                                  std::optional<std::chrono::milliseconds> timeout) const {
  ValidationVerdict verdict;

  // Static scan first: an unsafe program is never executed.
  auto safety = check_safety(program);
  if (safety.safe) safety = check_input_safety(input);
  verdict.safety = safety.safe ? CheckState::Pass : CheckState::Fail;
  verdict.offending = safety.offending;
  if (!safety.safe) {
    verdict.diagnostic = fmt::format("forbidden: {}", fmt::join(safety.offending, ", "));
    return verdict;
  }
  auto rest = validate_execution(program, input, timeout);
  rest.safety = CheckState::Pass;
  return rest;
}

ValidationVerdict Sandbox::validate_execution(const std::string& program, const std::string& input,
                                              std::optional<std::chrono::milliseconds> timeout) const {
  ValidationVerdict verdict;
  auto run = execute(program, input, timeout);
  if (run.harness_unavailable) throw HarnessError(run.detail);
  if (!run.ok()) {
    verdict.integrity = CheckState::Fail;
    verdict.diagnostic = fmt::format("{}: {}{}", to_string(run.status), run.error_class.value_or(""),
                                     run.detail.empty() ? "" : " " + run.detail);
    return verdict;
  }
  if (*run.value == "None") {
    verdict.integrity = CheckState::Fail;
    verdict.diagnostic = "program returned None";
    return verdict;
  }
  verdict.integrity = CheckState::Pass;

  auto det = check_determinism(program, input, config_.determinism_runs, timeout);
  if (det.outcome.harness_unavailable) throw HarnessError(det.outcome.detail);
  if (!det.deterministic) {
    verdict.determinism = CheckState::Fail;
    verdict.diagnostic = fmt::format("{}: {}{}", to_string(det.outcome.status),
                                     det.outcome.error_class.value_or(""),
                                     det.outcome.detail.empty() ? "" : " " + det.outcome.detail);
    return verdict;
  }
  verdict.determinism = CheckState::Pass;
  verdict.output = det.output;
  return verdict;
}

void Sandbox::self_check() const {
  auto zero = zero_triplet();
  auto outcome = execute(zero.program, zero.input);
  if (!outcome.ok() || *outcome.value != zero.output) {
    throw HarnessError(fmt::format("sandbox self-check failed ({}): {}", to_string(outcome.status),
                                   outcome.detail));
  }
}

}  // namespace azr::sandbox
