// Command-line entry point: seed, run, validate, verify, metrics, replay.
//
// Exit status: 0 success, 1 usage error, 2 validation failed (validate
// only), 3 runtime failure.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <map>

#include "azr/advantage/advantage.hpp"
#include "azr/core/jsonl.hpp"
#include "azr/metrics/metrics.hpp"
#include "azr/orchestrator/config.hpp"
#include "azr/orchestrator/experience.hpp"
#include "azr/orchestrator/self_play.hpp"
#include "azr/sandbox/sandbox.hpp"
#include "azr/solver/solver.hpp"

namespace {

using namespace azr;
using orchestrator::RunConfig;

constexpr int kExitUsage = 1;
constexpr int kExitValidationFailed = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
  std::optional<std::size_t> iterations, batch_size, references, seed_factor, solve_samples, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output, python, advantage, script;
  bool no_metrics = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--iterations,-T", iterations, "Self-play iterations");
    cmd->add_option("--batch-size,-B", batch_size, "Tasks per type and role per iteration");
    cmd->add_option("--references,-K", references, "Reference tasks per proposer prompt");
    cmd->add_option("--seed-factor,-S", seed_factor, "Seed set size multiplier");
    cmd->add_option("--solve-samples,-G", solve_samples, "Rollouts per learnability estimate");
    cmd->add_option("--workers", workers, "Concurrent interpreter processes");
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--output", output, "Output directory");
    cmd->add_option("--python", python, "Interpreter executable");
    cmd->add_option("--advantage", advantage, "trr or global")->check(CLI::IsMember({"trr", "global"}));
    cmd->add_option("--script", script, "Mock policy script (selects the mock policy)");
    cmd->add_flag("--no-metrics", no_metrics, "Skip task metrics");
  }

  void apply(RunConfig& c) const {
    if (iterations) c.iterations = *iterations;
    if (batch_size) c.proposer.batch_size = *batch_size;
    if (references) c.proposer.references = *references;
    if (seed_factor) c.proposer.seed_factor = *seed_factor;
    if (solve_samples) c.solve_samples = *solve_samples;
    if (workers) c.sandbox.workers = *workers;
    if (seed) c.seed = *seed;
    if (output) c.output_dir = *output;
    if (python) c.sandbox.python = *python;
    if (advantage) c.advantage = *advantage == "global" ? orchestrator::AdvantageMode::Global
                                                        : orchestrator::AdvantageMode::Trr;
    if (script) {
      c.policy_kind = orchestrator::PolicyKind::Mock;
      c.mock_script = *script;
    }
    if (no_metrics) c.metrics = false;
  }
};

std::string read_file(const std::string& path) { return sandbox::read_text_file(path); }

void print_report(const orchestrator::RunReport& report) {
  nlohmann::json out = {{"iterations_completed", report.iterations_completed},
                        {"iterations_this_call", report.iterations_this_call},
                        {"resumed", report.resumed},
                        {"records_emitted", report.records_emitted},
                        {"buffer_sizes",
                         {{"abduction", report.buffer_sizes[0]},
                          {"deduction", report.buffer_sizes[1]},
                          {"induction", report.buffer_sizes[2]}}}};
  std::cout << out.dump(2) << '\n';
}

sandbox::SandboxConfig sandbox_config(const std::optional<std::string>& config_file,
                                      const std::optional<std::string>& python, std::optional<long> timeout_ms) {
  sandbox::SandboxConfig c;
  if (config_file) c = orchestrator::load_config(*config_file).sandbox;
  if (python) c.python = *python;
  if (timeout_ms) c.timeout = std::chrono::milliseconds(*timeout_ms);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-play task proposal, validation and reward engine for program reasoning"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // seed / run
  std::string config_path;
  Overrides overrides;
  auto* seed_cmd = app.add_subcommand("seed", "Initialise the three task buffers");
  seed_cmd->add_option("--config", config_path, "Run config file")->required();
  overrides.attach(seed_cmd);
  auto* run_cmd = app.add_subcommand("run", "Seed (or resume) and run the self-play loop");
  run_cmd->add_option("--config", config_path, "Run config file")->required();
  overrides.attach(run_cmd);

  // validate
  std::string program_file, input;
  std::optional<std::string> tool_config, tool_python;
  std::optional<long> timeout_ms;
  auto* validate_cmd = app.add_subcommand("validate", "Run the task validation pipeline on one program");
  validate_cmd->add_option("program", program_file, "Program file")->required();
  validate_cmd->add_option("input", input, "Argument list for f")->required();
  for (auto* cmd : {validate_cmd}) {
    cmd->add_option("--config", tool_config, "Read sandbox settings from a run config");
    cmd->add_option("--python", tool_python, "Interpreter executable");
    cmd->add_option("--timeout-ms", timeout_ms, "Per-execution timeout");
  }

  // verify
  std::string verify_type, gold_output, answer;
  std::optional<std::string> answer_file, pairs_file, verify_program;
  auto* verify_cmd = app.add_subcommand("verify", "Check one solver answer");
  verify_cmd->add_option("--type", verify_type, "abduction, deduction or induction")
      ->required()
      ->check(CLI::IsMember({"abduction", "deduction", "induction"}));
  verify_cmd->add_option("--program", verify_program, "Gold program file (abduction, deduction)");
  verify_cmd->add_option("--gold-output", gold_output, "Gold output representation (abduction, deduction)");
  verify_cmd->add_option("--pairs", pairs_file, "JSON file of [[input, output], ...] (induction)");
  verify_cmd->add_option("--answer", answer, "Agent answer text");
  verify_cmd->add_option("--answer-file", answer_file, "Read the agent answer from a file");
  verify_cmd->add_option("--config", tool_config, "Read sandbox settings from a run config");
  verify_cmd->add_option("--python", tool_python, "Interpreter executable");
  verify_cmd->add_option("--timeout-ms", timeout_ms, "Per-execution timeout");

  // metrics
  std::string buffer_file;
  auto* metrics_cmd = app.add_subcommand("metrics", "Recompute task metrics over a buffer file");
  metrics_cmd->add_option("buffer", buffer_file, "Buffer JSONL file")->required();
  metrics_cmd->add_option("--config", tool_config, "Read sandbox settings from a run config");
  metrics_cmd->add_option("--python", tool_python, "Interpreter executable");

  // replay
  std::string experience_file, advantage_mode = "trr";
  std::optional<std::string> replay_output;
  auto* replay_cmd = app.add_subcommand("replay", "Recompute advantages over an experience file");
  replay_cmd->add_option("experience", experience_file, "Experience JSONL file")->required();
  replay_cmd->add_option("--advantage", advantage_mode, "trr or global")
      ->check(CLI::IsMember({"trr", "global"}));
  replay_cmd->add_option("--output", replay_output, "Write the re-annotated records here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("azr"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*seed_cmd || *run_cmd) {
      RunConfig config = orchestrator::load_config(config_path);
      overrides.apply(config);
      config.check();
      orchestrator::SelfPlay loop(config, orchestrator::make_policy(config));
      print_report(*seed_cmd ? loop.seed() : loop.run());
      return 0;
    }

    if (*validate_cmd) {
      sandbox::Sandbox box(sandbox_config(tool_config, tool_python, timeout_ms));
      auto verdict = box.validate_and_construct(read_file(program_file), input);
      nlohmann::json out = {{"passed", verdict.passed()},
                            {"safety", sandbox::to_string(verdict.safety)},
                            {"integrity", sandbox::to_string(verdict.integrity)},
                            {"determinism", sandbox::to_string(verdict.determinism)},
                            {"offending", verdict.offending},
                            {"diagnostic", verdict.diagnostic}};
      if (verdict.output) out["output"] = *verdict.output;
      std::cout << out.dump(2) << '\n';
      return verdict.passed() ? 0 : kExitValidationFailed;
    }

    if (*verify_cmd) {
      if (answer_file) answer = read_file(*answer_file);
      sandbox::Sandbox box(sandbox_config(tool_config, tool_python, timeout_ms));
      solver::Verification result;
      if (verify_type == "induction") {
        if (!pairs_file) throw CLI::RequiredError("--pairs");
        std::vector<IoPair> pairs;
        std::ifstream in(*pairs_file);
        for (const auto& p : nlohmann::json::parse(in)) pairs.push_back({p.at(0), p.at(1)});
        result = solver::verify_induction(box, answer, pairs);
      } else {
        if (!verify_program) throw CLI::RequiredError("--program");
        std::string program = read_file(*verify_program);
        result = verify_type == "abduction" ? solver::verify_abduction(box, program, gold_output, answer)
                                            : solver::verify_deduction(box, program, gold_output, answer);
      }
      std::cout << nlohmann::json{{"correct", result.correct}, {"detail", result.detail}}.dump() << '\n';
      return 0;
    }

    if (*metrics_cmd) {
      sandbox::Sandbox box(sandbox_config(tool_config, tool_python, std::nullopt));
      metrics::AnswerDiversityTracker tracker;
      for (const auto& line : read_jsonl(buffer_file)) {
        auto [type, task] = task_from_json(line);
        const auto& program = program_of(task);
        nlohmann::json out = {{"task_type", to_string(type)}};
        std::string error;
        if (auto h = metrics::halstead(box, program, &error)) {
          out["halstead_volume"] = h->volume;
          out["branches"] = h->branches;
        } else {
          out["halstead_error"] = error;
        }
        if (auto d = metrics::ast_edit_distance(box, program, program)) out["self_distance"] = d->value;
        if (const auto* t = std::get_if<Triplet>(&task)) {
          out["answer_diversity"] = tracker.observe(type == TaskType::Abduction ? t->input : t->output);
        }
        std::cout << out.dump() << '\n';
      }
      return 0;
    }

    if (*replay_cmd) {
      auto records = orchestrator::read_experience(experience_file);
      std::map<std::int64_t, std::vector<RolloutRecord>> by_iteration;
      std::size_t illegal = 0;
      for (auto& r : records) {
        if (!orchestrator::legal_reward(r.reward)) ++illegal;
        by_iteration[r.iteration].push_back(std::move(r));
      }
      std::vector<json> lines;
      for (auto& [iteration, batch] : by_iteration) {
        if (advantage_mode == "global") advantage::compute_global_baseline(batch);
        else advantage::compute_trr(batch);
        for (const auto& r : batch) lines.push_back(rollout_to_json(r));
      }
      if (replay_output) {
        std::filesystem::remove(*replay_output);
        append_jsonl(*replay_output, lines);
      }
      std::cout << nlohmann::json{{"records", lines.size()},
                                  {"iterations", by_iteration.size()},
                                  {"illegal_rewards", illegal}}
                       .dump()
                << '\n';
      return illegal == 0 ? 0 : kExitRuntime;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const orchestrator::ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
