#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "azr/core/buffer.hpp"
#include "azr/policy/policy.hpp"
#include "azr/proposer/prompt_library.hpp"
#include "azr/proposer/response_parse.hpp"
#include "azr/sandbox/sandbox.hpp"

namespace azr::proposer {

struct ProposerSettings {
  std::size_t batch_size = 64;        // B
  std::size_t references = 6;         // K
  std::size_t seed_factor = 4;        // S
  std::size_t induction_inputs = 10;  // N requested per induction proposal
  std::size_t max_prompt_tokens = 6144;
  std::size_t max_seed_rounds = 100;
  policy::SamplingParams sampling;
};

/// One proposer rollout and everything decided about it.
struct Proposal {
  TaskType task_type = TaskType::Deduction;
  std::size_t slot = 0;
  std::string prompt;
  std::string response;
  std::optional<policy::TokenUsage> usage;
  bool transport_failed = false;
  ProposalParse parse;
  std::vector<TaskRecord> references;  // as rendered (induction: the conditioning program)
  std::optional<TaskRecord> task;      // iff the proposal passed validation
  std::string diagnostic;
  bool inserted = false;

  bool valid() const noexcept { return task.has_value(); }
};

struct ProposePhaseResult {
  /// 3B proposals, slot-major; within a slot: induction, deduction, abduction.
  std::vector<Proposal> proposals;
  std::array<std::vector<TaskRecord>, 3> inserted;  // indexed by TaskType

  const std::vector<TaskRecord>& inserted_of(TaskType type) const {
    return inserted[static_cast<std::size_t>(type)];
  }
};

/// Renders a proposer prompt. Abduction/deduction inline every reference
/// triplet; induction uses the program of references[0]. When the prompt
/// exceeds `max_prompt_tokens` the leading references are dropped one at a
/// time (callers order references oldest first).
std::string build_proposer_prompt(TaskType type, const std::vector<TaskRecord>& references,
                                  const PromptLibrary& prompts,
                                  const std::vector<std::string>& forbidden,
                                  std::size_t induction_inputs,
                                  std::size_t max_prompt_tokens = 6144,
                                  std::size_t* kept = nullptr);

class Proposer {
 public:
  Proposer(const sandbox::Sandbox& sandbox, const PromptLibrary& prompts, ProposerSettings settings);

  const ProposerSettings& settings() const noexcept { return settings_; }

  /// Fills all three buffers to B*S items. Seed programs are stripped of
  /// comments and top-level assignments, then revalidated. Transport errors
  /// abort seeding; invalid candidates are skipped. Throws azr::Error if
  /// max_seed_rounds rounds of B requests do not fill a buffer.
  BufferSet seed_buffers(policy::Policy& policy, Rng& rng,
                         std::size_t capacity = kDefaultBufferCapacity) const;

  /// One propose phase: B slots of (induction, deduction, abduction).
  /// Every sampling decision is drawn from `rng` before any request is
  /// issued, so the result depends only on the rng state and the policy's
  /// responses. Valid tasks are inserted in proposal order.
  ProposePhaseResult propose_phase(policy::Policy& policy, BufferSet& buffers, Rng& rng) const;

  /// Validates a parsed proposal. For induction, `program` is the
  /// conditioning program and every proposed input must validate.
  std::optional<TaskRecord> validate(const ProposalParse& parse, const std::string& program,
                                     std::string* diagnostic = nullptr) const;

  /// Seed-time program cleanup through the harness; nullopt if it fails.
  std::optional<std::string> strip_program(const std::string& program) const;

 private:
  struct Pending {
    TaskType type;
    std::size_t slot;
    std::vector<TaskRecord> references;
  };

  std::vector<Proposal> generate(policy::Policy& policy, const std::vector<Pending>& pending) const;
  std::vector<TaskRecord> sample_references(const TaskBuffer& buffer, Rng& rng) const;

  const sandbox::Sandbox& sandbox_;
  const PromptLibrary& prompts_;
  ProposerSettings settings_;
};

}  // namespace azr::proposer
