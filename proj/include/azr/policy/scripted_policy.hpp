#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "azr/policy/policy.hpp"

namespace azr::policy {

class UnmatchedPromptError : public Error {
 public:
  using Error::Error;
};

/// Deterministic policy driven by a JSON script:
///
///   {
///     "unmatched": "error" | "fallback",
///     "fallback": "<response>",
///     "rules": [
///       {"exact": "<prompt>",         "responses": ["...", ...]},
///       {"tag": "propose/deduction",  "responses": [...]},
///       {"contains": "<substring>",   "responses": [...]}
///     ]
///   }
///
/// The first matching rule answers. Each rule walks its response list one
/// call at a time and repeats the last entry once exhausted.
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(const nlohmann::json& script);

  PolicyTranscript generate(const GenerationRequest& request) override;
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& state) override;

 private:
  enum class MatchKind { Exact, Tag, Contains };
  struct Rule {
    MatchKind kind;
    std::string pattern;
    std::vector<std::string> responses;
    std::size_t calls = 0;
  };

  bool matches(const Rule& rule, const GenerationRequest& request) const;

  mutable std::mutex mutex_;
  std::vector<Rule> rules_;
  bool fallback_enabled_ = false;
  std::string fallback_;
};

std::unique_ptr<ScriptedPolicy> mock_from_script(const std::filesystem::path& script_file);

}  // namespace azr::policy
