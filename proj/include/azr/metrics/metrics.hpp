#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "azr/core/types.hpp"
#include "azr/sandbox/sandbox.hpp"

namespace azr::metrics {

/// Halstead counts: distinct (n1, n2) and total (N1, N2) operators and
/// operands, volume = (N1 + N2) * log2(n1 + n2), plus a branch count
/// (1 + decision points).
struct Halstead {
  std::size_t distinct_operators = 0;
  std::size_t distinct_operands = 0;
  std::size_t total_operators = 0;
  std::size_t total_operands = 0;
  double volume = 0.0;
  std::size_t branches = 0;
};

Halstead halstead_from_tokens(const std::vector<std::string>& operators,
                              const std::vector<std::string>& operands, std::size_t branches);

/// Tokenizes through the harness. nullopt (with `error`) for empty or
/// untokenizable programs.
std::optional<Halstead> halstead(const sandbox::Sandbox& sandbox, const std::string& program,
                                 std::string* error = nullptr);

struct AstDistance {
  double value = 0.0;
  bool token_fallback = false;  // a tree exceeded the node budget
};

inline constexpr std::size_t kDefaultNodeBudget = 500;

/// Tree edit distance between harness syntax-tree dumps. nullopt when
/// either program does not parse.
std::optional<AstDistance> ast_edit_distance(const sandbox::Sandbox& sandbox, const std::string& a,
                                             const std::string& b,
                                             std::size_t node_budget = kDefaultNodeBudget,
                                             std::string* error = nullptr);

/// Empirical distribution over answers seen so far.
class AnswerDiversityTracker {
 public:
  /// 1 - p(answer) under the counts before this observation, then records it.
  double observe(const std::string& answer);

  std::size_t total() const;
  nlohmann::json to_json() const;
  void from_json(const nlohmann::json& state);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

struct TaskMetrics {
  TaskType task_type = TaskType::Deduction;
  std::size_t slot = 0;
  std::optional<Halstead> complexity;
  std::optional<AstDistance> ast_distance_mean;  // vs. the prompt references
  std::optional<double> answer_diversity;

  nlohmann::json to_json() const;
};

}  // namespace azr::metrics
