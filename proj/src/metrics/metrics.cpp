#include "azr/metrics/metrics.hpp"

#include <cmath>
#include <set>

#include "azr/metrics/tree_edit.hpp"
#include "azr/proposer/response_parse.hpp"

namespace azr::metrics {

Halstead halstead_from_tokens(const std::vector<std::string>& operators,
                              const std::vector<std::string>& operands, std::size_t branches) {
  Halstead h;
  h.distinct_operators = std::set<std::string>(operators.begin(), operators.end()).size();
  h.distinct_operands = std::set<std::string>(operands.begin(), operands.end()).size();
  h.total_operators = operators.size();
  h.total_operands = operands.size();
  std::size_t vocabulary = h.distinct_operators + h.distinct_operands;
  std::size_t length = h.total_operators + h.total_operands;
  h.volume = vocabulary > 0 ? static_cast<double>(length) * std::log2(static_cast<double>(vocabulary)) : 0.0;
  h.branches = branches;
  return h;
}

std::optional<Halstead> halstead(const sandbox::Sandbox& sandbox, const std::string& program,
                                 std::string* error) {
  if (proposer::trim(program).empty()) {
    if (error) *error = "empty program";
    return std::nullopt;
  }
  auto tokens = sandbox.analyze("tokens", program, error);
  if (!tokens) return std::nullopt;
  return halstead_from_tokens(tokens->at("operators").get<std::vector<std::string>>(),
                              tokens->at("operands").get<std::vector<std::string>>(),
                              tokens->at("branches").get<std::size_t>());
}

std::optional<AstDistance> ast_edit_distance(const sandbox::Sandbox& sandbox, const std::string& a,
                                             const std::string& b, std::size_t node_budget,
                                             std::string* error) {
  auto dump_a = sandbox.analyze("dump", a, error);
  if (!dump_a) return std::nullopt;
  auto dump_b = a == b ? dump_a : sandbox.analyze("dump", b, error);
  if (!dump_b) return std::nullopt;
  TreeNode ta = tree_from_json(*dump_a);
  TreeNode tb = tree_from_json(*dump_b);
  if (tree_size(ta) > node_budget || tree_size(tb) > node_budget) {
    return AstDistance{static_cast<double>(token_edit_distance(lex_tokens(a), lex_tokens(b))), true};
  }
  return AstDistance{static_cast<double>(tree_edit_distance(ta, tb)), false};
}

double AnswerDiversityTracker::observe(const std::string& answer) {
  std::lock_guard lock(mutex_);
  auto& count = counts_[answer];
  double p = total_ == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total_);
  ++count;
  ++total_;
  return 1.0 - p;
}

std::size_t AnswerDiversityTracker::total() const {
  std::lock_guard lock(mutex_);
  return total_;
}

nlohmann::json AnswerDiversityTracker::to_json() const {
  std::lock_guard lock(mutex_);
  return counts_;
}

void AnswerDiversityTracker::from_json(const nlohmann::json& state) {
  std::lock_guard lock(mutex_);
  counts_ = state.get<std::map<std::string, std::size_t>>();
  total_ = 0;
  for (const auto& [_, n] : counts_) total_ += n;
}

nlohmann::json TaskMetrics::to_json() const {
  nlohmann::json out = {{"task_type", azr::to_string(task_type)}, {"slot", slot}};
  if (complexity) {
    out["halstead"] = {{"n1", complexity->distinct_operators},
                       {"n2", complexity->distinct_operands},
                       {"N1", complexity->total_operators},
                       {"N2", complexity->total_operands},
                       {"volume", complexity->volume}};
    out["branches"] = complexity->branches;
  }
  if (ast_distance_mean) {
    out["ast_edit_distance_mean"] = ast_distance_mean->value;
    out["ast_token_fallback"] = ast_distance_mean->token_fallback;
  }
  if (answer_diversity) out["answer_diversity"] = *answer_diversity;
  return out;
}

}  // namespace azr::metrics
