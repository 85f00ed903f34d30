#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "azr/policy/chat_client.hpp"
#include "azr/proposer/proposer.hpp"
#include "azr/sandbox/sandbox.hpp"

namespace azr::orchestrator {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class AdvantageMode { Trr, Global };
enum class PolicyKind { Mock, Remote };

std::string_view to_string(AdvantageMode mode);

/// Everything a run needs. Loaded from an INI-style file:
///
///   [loop]     batch_size references iterations seed_factor solve_samples
///              induction_inputs buffer_capacity seed advantage
///              running_baselines lambda metrics max_prompt_tokens
///              max_seed_rounds
///   [sampling] temperature top_p max_response_tokens
///   [sandbox]  python harness timeout_ms workers determinism_runs
///              forbidden (comma separated)
///   [policy]   kind (mock|remote) script base_url model api_key_env mode
///              (chat|completion) max_in_flight max_retries timeout_s
///   [paths]    output prompts
///
/// Relative paths resolve against the config file's directory.
struct RunConfig {
  proposer::ProposerSettings proposer;
  std::size_t iterations = 500;    // T
  std::size_t solve_samples = 8;   // G
  std::size_t buffer_capacity = kDefaultBufferCapacity;
  std::uint64_t seed = 0;
  AdvantageMode advantage = AdvantageMode::Trr;
  bool running_baselines = false;
  double lambda = 1.0;  // carried for the trainer, never applied here
  bool metrics = true;

  sandbox::SandboxConfig sandbox;

  PolicyKind policy_kind = PolicyKind::Mock;
  std::filesystem::path mock_script;
  policy::ChatClientConfig remote;

  std::filesystem::path output_dir = "run";
  std::filesystem::path prompt_dir = AZR_DEFAULT_PROMPT_DIR;

  /// Throws ConfigError on out-of-range values.
  void check() const;
};

RunConfig load_config(const std::filesystem::path& file);

}  // namespace azr::orchestrator
