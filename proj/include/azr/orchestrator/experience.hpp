#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "azr/core/types.hpp"

namespace azr::orchestrator {

/// Records of one iteration plus a per-group summary.
struct ExperienceBatch {
  std::int64_t iteration = 0;
  std::vector<RolloutRecord> records;
  /// Response length (tokens) of each record, parallel to `records`.
  std::vector<std::size_t> response_tokens;
  std::array<std::size_t, 3> buffer_sizes{};  // indexed by TaskType

  nlohmann::json summary() const;
};

/// Appends one line per record. Every advantage must be finite.
void emit_experience(const std::filesystem::path& file, const ExperienceBatch& batch);

std::vector<RolloutRecord> read_experience(const std::filesystem::path& file);

/// True when `reward` is a value the composite rule can produce.
bool legal_reward(double reward);

}  // namespace azr::orchestrator
