#pragma once

#include <optional>
#include <string>
#include <vector>

#include "azr/core/buffer.hpp"
#include "azr/core/types.hpp"
#include "azr/proposer/prompt_library.hpp"
#include "azr/sandbox/sandbox.hpp"

namespace azr::solver {

/// A task as presented to the solver. Deduction shows (program, input),
/// abduction shows (program, output), induction shows the first N/2 pairs
/// (rounded down) and the message. `source` keeps the full gold task.
struct SolverQuery {
  TaskType task_type = TaskType::Deduction;
  TaskRecord source;
  std::vector<IoPair> visible;  // induction only
  std::vector<IoPair> hidden;   // induction only
  std::string prompt;
};

/// Builds the query and renders its prompt.
SolverQuery make_query(TaskType type, const TaskRecord& task, const proposer::PromptLibrary& prompts,
                       const std::vector<std::string>& forbidden);

/// Number of induction pairs shown to the solver.
inline std::size_t visible_pair_count(std::size_t n) { return n / 2; }

/// Exactly `batch_size` queries: every task in `fresh` first (in order, up to
/// batch_size), then uniform draws from `buffer` for the remainder.
std::vector<SolverQuery> build_solver_batch(TaskType type, const TaskBuffer& buffer,
                                            const std::vector<TaskRecord>& fresh,
                                            std::size_t batch_size, Rng& rng,
                                            const proposer::PromptLibrary& prompts,
                                            const std::vector<std::string>& forbidden);

/// Answer text of a solver response, or nullopt for a format error. The
/// answer may be bare or wrapped in one code fence. Induction answers must
/// define `f`.
std::optional<std::string> parse_answer(std::string_view response, TaskType type);

struct Verification {
  bool correct = false;
  std::string detail;
};

/// f(agent_input) == gold_output inside the interpreter.
Verification verify_abduction(const sandbox::Sandbox& sandbox, const std::string& program,
                              const std::string& gold_output, const std::string& agent_input);

/// eval(gold_output) == eval(agent_output); `program` is defined first so
/// reprs of its own classes evaluate.
Verification verify_deduction(const sandbox::Sandbox& sandbox, const std::string& program,
                              const std::string& gold_output, const std::string& agent_output);

/// Every pair satisfies agent_program(input) == output.
Verification verify_induction(const sandbox::Sandbox& sandbox, const std::string& agent_program,
                              const std::vector<IoPair>& pairs);

/// Dispatches on the query type. Induction is graded on all N pairs.
Verification verify_answer(const sandbox::Sandbox& sandbox, const SolverQuery& query,
                           const std::string& answer);

}  // namespace azr::solver
