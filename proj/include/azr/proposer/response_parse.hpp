#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "azr/core/types.hpp"

namespace azr::proposer {

/// Content of the answer block of a think/answer formatted response.
///
/// The response must close a think block and then hold exactly one
/// <answer>...</answer> pair. An opening <think> is optional because the
/// prompt wrapper already ends with it.
std::optional<std::string> extract_answer(std::string_view response);

/// Bodies of every ```lang fenced block, in order.
std::vector<std::string> fenced_blocks(std::string_view text, std::string_view lang);

/// Removes one surrounding ``` fence (with optional language tag) if present
/// and trims surrounding whitespace.
std::string strip_code_fence(std::string_view text);

std::string trim(std::string_view text);

/// True when some line starts a `def f(` definition.
bool defines_f(std::string_view program);

struct CodeProposal {
  std::string program;
  std::string input;
};

struct InductionProposal {
  std::vector<std::string> inputs;
  std::string message;
};

struct ProposalParse {
  TaskType task_type = TaskType::Deduction;
  ParseStatus status = ParseStatus::FormatError;
  std::optional<std::variant<CodeProposal, InductionProposal>> payload;  // iff WellFormatted
  std::string error;
};

/// Abduction/deduction answers need one ```python block defining f and one
/// ```input block. Induction answers need at least two ```input blocks and
/// one ```message block (its text may be empty).
ProposalParse parse_proposal(std::string_view response, TaskType type);

}  // namespace azr::proposer
