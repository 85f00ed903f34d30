#include "azr/orchestrator/experience.hpp"

#include <fmt/format.h>

#include "azr/core/jsonl.hpp"

namespace azr::orchestrator {

nlohmann::json ExperienceBatch::summary() const {
  std::array<double, kGroupCount> reward_sum{};
  std::array<double, kGroupCount> token_sum{};
  std::array<std::size_t, kGroupCount> count{};
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::size_t g = group_index({records[i].task_type, records[i].role});
    reward_sum[g] += records[i].reward;
    token_sum[g] += i < response_tokens.size() ? static_cast<double>(response_tokens[i]) : 0.0;
    ++count[g];
  }
  nlohmann::json groups = nlohmann::json::object();
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    if (count[g] == 0) continue;
    auto key = group_from_index(g);
    double n = static_cast<double>(count[g]);
    groups[fmt::format("{}/{}", to_string(key.role), to_string(key.task_type))] = {
        {"count", count[g]}, {"reward_mean", reward_sum[g] / n}, {"response_tokens_mean", token_sum[g] / n}};
  }
  nlohmann::json sizes = nlohmann::json::object();
  for (TaskType type : kAllTaskTypes) sizes[std::string(to_string(type))] = buffer_sizes[static_cast<std::size_t>(type)];
  return {{"iteration", iteration}, {"records", records.size()}, {"groups", groups}, {"buffer_sizes", sizes}};
}

void emit_experience(const std::filesystem::path& file, const ExperienceBatch& batch) {
  std::vector<json> lines;
  lines.reserve(batch.records.size());
  for (const auto& record : batch.records) lines.push_back(rollout_to_json(record));
  append_jsonl(file, lines);
}

std::vector<RolloutRecord> read_experience(const std::filesystem::path& file) {
  std::vector<RolloutRecord> out;
  for (const auto& line : read_jsonl(file)) out.push_back(rollout_from_json(line));
  return out;
}

bool legal_reward(double reward) {
  return reward == -1.0 || reward == -0.5 || (reward >= 0.0 && reward <= 1.0);
}

}  // namespace azr::orchestrator
