#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "azr/policy/scripted_policy.hpp"
#include "azr/sandbox/sandbox.hpp"
#include "azr/sandbox/process.hpp"

namespace azr::test {

inline sandbox::SandboxConfig quick_config() {
  sandbox::SandboxConfig c;
  c.timeout = std::chrono::milliseconds(5000);
  c.workers = 2;
  return c;
}

inline const sandbox::Sandbox& shared_sandbox() {
  static const sandbox::Sandbox box(quick_config());
  return box;
}

/// Well-formed proposer response for abduction/deduction.
inline std::string code_response(const std::string& program, const std::string& input) {
  return "plan\n</think>\n<answer>\n```python\n" + program + "\n```\n```input\n" + input +
         "\n```\n</answer>";
}

inline std::string induction_response(const std::vector<std::string>& inputs, const std::string& message) {
  std::string out = "plan\n</think>\n<answer>\n";
  for (const auto& in : inputs) out += "```input\n" + in + "\n```\n";
  return out + "```message\n" + message + "\n```\n</answer>";
}

inline std::string answer_response(const std::string& answer) {
  return "thinking\n</think> <answer>" + answer + "</answer>";
}

/// Scripted policy answering every tag with a fixed sequence.
inline std::shared_ptr<policy::ScriptedPolicy> tag_policy(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& rules) {
  nlohmann::json script = {{"unmatched", "error"}, {"rules", nlohmann::json::array()}};
  for (const auto& [tag, responses] : rules) script["rules"].push_back({{"tag", tag}, {"responses", responses}});
  return std::make_shared<policy::ScriptedPolicy>(script);
}

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(AZR_FIXTURE_DIR) / name;
}

}  // namespace azr::test
