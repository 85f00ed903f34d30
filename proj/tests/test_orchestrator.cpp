#include <doctest.h>

#include <fstream>
#include <sstream>

#include "azr/core/jsonl.hpp"
#include "azr/orchestrator/config.hpp"
#include "azr/orchestrator/experience.hpp"
#include "azr/orchestrator/self_play.hpp"
#include "support.hpp"

using namespace azr;
using namespace azr::orchestrator;
using azr::test::fixture;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

RunConfig small_run(const fs::path& output, std::size_t iterations) {
  auto config = load_config(fixture("mock_run.ini"));
  config.proposer.batch_size = 1;
  config.solve_samples = 2;
  config.iterations = iterations;
  config.output_dir = output;
  return config;
}

RunReport run_once(const RunConfig& config) {
  SelfPlay loop(config, make_policy(config));
  return loop.run();
}

std::vector<std::string> run_files(const fs::path& dir) {
  RunPaths paths(dir);
  std::vector<std::string> out = {slurp(paths.experience())};
  for (TaskType t : kAllTaskTypes) out.push_back(slurp(paths.buffer(t)));
  return out;
}

sandbox::ProcessResult cli(std::vector<std::string> args) {
  sandbox::ProcessOptions options;
  options.executable = AZR_CLI_PATH;
  options.args = std::move(args);
  options.environment = {"PATH=/usr/local/bin:/usr/bin:/bin"};
  options.timeout = std::chrono::seconds(60);
  return sandbox::run_process(options);
}

}  // namespace

TEST_SUITE("orchestrator") {
  TEST_CASE("config file loading") {
    auto config = load_config(fixture("mock_run.ini"));
    CHECK(config.proposer.batch_size == 2);
    CHECK(config.proposer.references == 6);
    CHECK(config.iterations == 2);
    CHECK(config.solve_samples == 2);
    CHECK(config.seed == 1234);
    CHECK(config.sandbox.workers == 2);
    CHECK(config.sandbox.timeout == std::chrono::milliseconds(5000));
    CHECK(config.policy_kind == PolicyKind::Mock);
    CHECK(config.mock_script == fixture("mock_policy.json"));
    CHECK(config.output_dir == fixture("out"));
    CHECK(config.advantage == AdvantageMode::Trr);
    CHECK_NOTHROW(config.check());
  }

  TEST_CASE("bad config values are rejected") {
    sandbox::TempDir dir("azr-config");
    auto write = [&](const std::string& text) {
      std::ofstream(dir.path() / "c.ini") << text;
      return dir.path() / "c.ini";
    };
    CHECK_THROWS_AS(load_config(write("[loop]\nbatch_size = many\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write("[loop]\nadvantage = median\n")), ConfigError);
    CHECK_THROWS_AS(load_config(dir.path() / "missing.ini"), ConfigError);
    auto config = load_config(write("[loop]\nbatch_size = 0\n[policy]\nkind = remote\nmodel = m\n"));
    CHECK_THROWS_AS(config.check(), ConfigError);
  }

  TEST_CASE("experience files round trip") {
    sandbox::TempDir dir("azr-exp");
    ExperienceBatch batch;
    batch.iteration = 4;
    batch.records = {RolloutRecord{Role::Propose, TaskType::Deduction, "p", "r", ParseStatus::WellFormatted, 0.5, 1.0, 4},
                     RolloutRecord{Role::Solve, TaskType::Abduction, "p2", "r2", ParseStatus::FormatError, -1.0, -1.0, 4}};
    batch.response_tokens = {3, 4};
    emit_experience(dir.path() / "e.jsonl", batch);
    CHECK(read_experience(dir.path() / "e.jsonl") == batch.records);
    CHECK(legal_reward(-0.5));
    CHECK(legal_reward(0.3));
    CHECK_FALSE(legal_reward(1.5));
    CHECK_FALSE(legal_reward(-0.25));
  }

  TEST_CASE("zero iterations only seeds") {
    sandbox::TempDir dir("azr-t0");
    auto config = small_run(dir.path() / "run", 0);
    auto report = run_once(config);
    CHECK(report.iterations_completed == 0);
    RunPaths paths(config.output_dir);
    for (TaskType t : kAllTaskTypes) CHECK(load_buffer(paths.buffer(t), t).size() == 4);
    CHECK(slurp(paths.experience()).empty());
    CHECK(fs::exists(paths.state()));
  }

  TEST_CASE("resume after a crash matches an uninterrupted run") {
    sandbox::TempDir dir("azr-resume");
    auto straight = small_run(dir.path() / "straight", 2);
    auto report = run_once(straight);
    CHECK(report.iterations_completed == 2);
    CHECK(report.records_emitted == 12);

    auto interrupted = small_run(dir.path() / "interrupted", 1);
    run_once(interrupted);
    // A partial write past the last checkpoint is discarded on resume.
    std::ofstream(RunPaths(interrupted.output_dir).experience(), std::ios::app) << "{\"half\":";
    std::ofstream(RunPaths(interrupted.output_dir).buffer(TaskType::Deduction), std::ios::app) << "garbage\n";
    interrupted.iterations = 2;
    auto resumed = run_once(interrupted);
    CHECK(resumed.resumed);
    CHECK(resumed.iterations_this_call == 1);
    CHECK(run_files(straight.output_dir) == run_files(interrupted.output_dir));

    auto other_seed = small_run(dir.path() / "interrupted", 3);
    other_seed.seed = 99;
    CHECK_THROWS(run_once(other_seed));
  }

  TEST_CASE("command line exit codes") {
    sandbox::TempDir dir("azr-cli");
    std::ofstream(dir.path() / "identity.py") << "def f(x):\n    return x\n";
    std::ofstream(dir.path() / "spawn.py") << "import subprocess\ndef f(x):\n    return x\n";

    auto ok = cli({"validate", (dir.path() / "identity.py").string(), "'Hello World'"});
    CHECK(ok.exit_code == 0);
    CHECK(nlohmann::json::parse(ok.stdout_data)["output"] == "'Hello World'");

    auto unsafe = cli({"validate", (dir.path() / "spawn.py").string(), "1"});
    CHECK(unsafe.exit_code == 2);
    CHECK(unsafe.stdout_data.find("subprocess") != std::string::npos);

    CHECK(cli({"validate"}).exit_code == 1);
    CHECK(cli({"frobnicate"}).exit_code == 1);
    CHECK(cli({"run", "--config", (dir.path() / "none.ini").string()}).exit_code == 1);

    auto verify = cli({"verify", "--type", "deduction", "--program", (dir.path() / "identity.py").string(),
                       "--gold-output", "{1, 2}", "--answer", "{2, 1}"});
    CHECK(verify.exit_code == 0);
    CHECK(nlohmann::json::parse(verify.stdout_data)["correct"] == true);
  }
}
