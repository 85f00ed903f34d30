#include "azr/policy/scripted_policy.hpp"

#include <fmt/format.h>

#include <fstream>

namespace azr::policy {

ScriptedPolicy::ScriptedPolicy(const nlohmann::json& script) {
  try {
    std::string unmatched = script.value("unmatched", std::string("error"));
    if (unmatched == "fallback") {
      fallback_enabled_ = true;
      fallback_ = script.at("fallback").get<std::string>();
    } else if (unmatched != "error") {
      throw Error(fmt::format("unknown 'unmatched' mode '{}'", unmatched));
    }
    for (const auto& entry : script.at("rules")) {
      Rule rule;
      if (entry.contains("exact")) {
        rule.kind = MatchKind::Exact;
        rule.pattern = entry.at("exact").get<std::string>();
      } else if (entry.contains("tag")) {
        rule.kind = MatchKind::Tag;
        rule.pattern = entry.at("tag").get<std::string>();
      } else if (entry.contains("contains")) {
        rule.kind = MatchKind::Contains;
        rule.pattern = entry.at("contains").get<std::string>();
      } else {
        throw Error("script rule needs one of 'exact', 'tag', 'contains'");
      }
      rule.responses = entry.at("responses").get<std::vector<std::string>>();
      if (rule.responses.empty()) throw Error("script rule has no responses");
      rules_.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("malformed policy script: {}", e.what()));
  }
}

bool ScriptedPolicy::matches(const Rule& rule, const GenerationRequest& request) const {
  switch (rule.kind) {
    case MatchKind::Exact:
      return request.prompt == rule.pattern;
    case MatchKind::Tag:
      return request.tag && tag_string(*request.tag) == rule.pattern;
    case MatchKind::Contains:
      return request.prompt.find(rule.pattern) != std::string::npos;
  }
  return false;
}

PolicyTranscript ScriptedPolicy::generate(const GenerationRequest& request) {
  PolicyTranscript transcript;
  transcript.prompt = request.prompt;
  std::lock_guard lock(mutex_);
  for (auto& rule : rules_) {
    if (!matches(rule, request)) continue;
    std::size_t index = std::min(rule.calls, rule.responses.size() - 1);
    ++rule.calls;
    transcript.response = rule.responses[index];
    return transcript;
  }
  if (!fallback_enabled_) {
    throw UnmatchedPromptError(fmt::format(
        "no script rule matches prompt (tag {})",
        request.tag ? tag_string(*request.tag) : std::string("none")));
  }
  transcript.response = fallback_;
  return transcript;
}

nlohmann::json ScriptedPolicy::checkpoint() const {
  std::lock_guard lock(mutex_);
  nlohmann::json calls = nlohmann::json::array();
  for (const auto& rule : rules_) calls.push_back(rule.calls);
  return nlohmann::json{{"calls", std::move(calls)}};
}

void ScriptedPolicy::restore(const nlohmann::json& state) {
  if (!state.is_object() || !state.contains("calls")) return;
  std::lock_guard lock(mutex_);
  const auto& calls = state.at("calls");
  if (calls.size() != rules_.size()) throw Error("policy checkpoint does not match the script");
  for (std::size_t i = 0; i < rules_.size(); ++i) rules_[i].calls = calls[i].get<std::size_t>();
}

std::unique_ptr<ScriptedPolicy> mock_from_script(const std::filesystem::path& script_file) {
  std::ifstream in(script_file);
  if (!in) throw Error(fmt::format("cannot read policy script {}", script_file.string()));
  try {
    return std::make_unique<ScriptedPolicy>(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(fmt::format("{}: {}", script_file.string(), e.what()));
  }
}

}  // namespace azr::policy
