#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "azr/core/types.hpp"

namespace azr::policy {

/// Failure to obtain a completion (network, HTTP status, exhausted retries).
class TransportError : public Error {
 public:
  using Error::Error;
};

struct SamplingParams {
  double temperature = 1.0;
  double top_p = 1.0;
  int max_response_tokens = 8096;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

/// Which (role, task type) a prompt belongs to. Lets scripted policies match
/// on the kind of request; remote clients ignore it.
struct PromptTag {
  Role role;
  TaskType task_type;
};

std::string tag_string(const PromptTag& tag);

struct GenerationRequest {
  std::string prompt;
  SamplingParams params;
  std::optional<PromptTag> tag;
};

struct PolicyTranscript {
  std::string prompt;
  std::string response;  // raw model output, never post-processed
  std::optional<TokenUsage> usage;
  std::chrono::nanoseconds latency{0};
  bool truncated = false;  // stopped at max_response_tokens
};

class Policy {
 public:
  virtual ~Policy() = default;

  /// One completion per call. Throws TransportError when no completion
  /// could be obtained.
  virtual PolicyTranscript generate(const GenerationRequest& request) = 0;

  /// Concurrent generate() calls the orchestrator may issue.
  virtual std::size_t max_in_flight() const { return 1; }

  /// Opaque replay state persisted across resumes.
  virtual nlohmann::json checkpoint() const { return nullptr; }
  virtual void restore(const nlohmann::json& /*state*/) {}
};

/// Wraps another policy and keeps every transcript it returns.
class RecordingPolicy : public Policy {
 public:
  explicit RecordingPolicy(std::shared_ptr<Policy> inner) : inner_(std::move(inner)) {}

  PolicyTranscript generate(const GenerationRequest& request) override;
  std::size_t max_in_flight() const override { return 1; }
  nlohmann::json checkpoint() const override { return inner_->checkpoint(); }
  void restore(const nlohmann::json& state) override { inner_->restore(state); }

  std::vector<PolicyTranscript> transcripts() const;

 private:
  std::shared_ptr<Policy> inner_;
  mutable std::mutex mutex_;
  std::vector<PolicyTranscript> transcripts_;
};

/// Returns recorded responses in order, ignoring the prompt contents.
class ReplayPolicy : public Policy {
 public:
  explicit ReplayPolicy(std::vector<PolicyTranscript> transcripts)
      : transcripts_(std::move(transcripts)) {}

  PolicyTranscript generate(const GenerationRequest& request) override;
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& state) override;

 private:
  mutable std::mutex mutex_;
  std::vector<PolicyTranscript> transcripts_;
  std::size_t next_ = 0;
};

}  // namespace azr::policy
