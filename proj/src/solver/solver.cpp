#include "azr/solver/solver.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "azr/proposer/response_parse.hpp"

namespace azr::solver {

namespace {

using sandbox::DriverKind;
using sandbox::OutcomeStatus;

std::string format_pairs(const std::vector<IoPair>& pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0) out += "\n";
    out += fmt::format("Example {}:\n```input\n{}\n```\n```output\n{}\n```\n", i + 1, pairs[i].input,
                       pairs[i].output);
  }
  return out;
}

// A garbled protocol line gets one retry; an unusable harness is fatal.
Verification run_verdict(const sandbox::Sandbox& sandbox, const std::string& script) {
  sandbox::ExecutionOutcome outcome;
  for (int attempt = 0; attempt < 2; ++attempt) {
    outcome = sandbox.run_script(script);
    if (outcome.harness_unavailable) throw sandbox::HarnessError(outcome.detail);
    if (outcome.status != OutcomeStatus::HarnessFailure) break;
    spdlog::debug("verification protocol failure, attempt {}: {}", attempt + 1, outcome.detail);
  }
  Verification result;
  switch (outcome.status) {
    case OutcomeStatus::Ok:
      result.correct = *outcome.value == "True";
      result.detail = *outcome.value;
      break;
    case OutcomeStatus::RaisedError:
      result.detail = fmt::format("{}: {}", outcome.error_class.value_or(""), outcome.detail);
      break;
    default:
      result.detail = fmt::format("{}: {}", sandbox::to_string(outcome.status), outcome.detail);
      break;
  }
  return result;
}

Verification unsafe(const sandbox::SafetyVerdict& verdict) {
  return {false, fmt::format("forbidden: {}", fmt::join(verdict.offending, ", "))};
}

}  // namespace

SolverQuery make_query(TaskType type, const TaskRecord& task, const proposer::PromptLibrary& prompts,
                       const std::vector<std::string>& forbidden) {
  SolverQuery query;
  query.task_type = type;
  query.source = task;
  if (type == TaskType::Induction) {
    const auto* ind = std::get_if<InductionTask>(&task);
    if (!ind) throw Error("induction query needs an induction task");
    std::size_t shown = visible_pair_count(ind->pairs.size());
    query.visible.assign(ind->pairs.begin(), ind->pairs.begin() + static_cast<std::ptrdiff_t>(shown));
    query.hidden.assign(ind->pairs.begin() + static_cast<std::ptrdiff_t>(shown), ind->pairs.end());
    query.prompt = prompts.render(Role::Solve, type,
                                  {{"message", ind->message},
                                   {"pairs", format_pairs(query.visible)},
                                   {"forbidden_modules", fmt::format("{}", fmt::join(forbidden, ", "))}});
    return query;
  }
  const auto* triplet = std::get_if<Triplet>(&task);
  if (!triplet) throw Error(fmt::format("{} query needs a triplet", to_string(type)));
  if (type == TaskType::Deduction) {
    query.prompt =
        prompts.render(Role::Solve, type, {{"program", triplet->program}, {"input", triplet->input}});
  } else {
    query.prompt =
        prompts.render(Role::Solve, type, {{"program", triplet->program}, {"output", triplet->output}});
  }
  return query;
}

std::vector<SolverQuery> build_solver_batch(TaskType type, const TaskBuffer& buffer,
                                            const std::vector<TaskRecord>& fresh,
                                            std::size_t batch_size, Rng& rng,
                                            const proposer::PromptLibrary& prompts,
                                            const std::vector<std::string>& forbidden) {
  std::vector<SolverQuery> batch;
  batch.reserve(batch_size);
  for (const auto& task : fresh) {
    if (batch.size() == batch_size) break;
    batch.push_back(make_query(type, task, prompts, forbidden));
  }
  if (batch.size() < batch_size) {
    for (const auto& task : buffer.sample(batch_size - batch.size(), rng)) {
      batch.push_back(make_query(type, task, prompts, forbidden));
    }
  }
  return batch;
}

std::optional<std::string> parse_answer(std::string_view response, TaskType type) {
  auto answer = proposer::extract_answer(response);
  if (!answer) return std::nullopt;
  std::string body = proposer::strip_code_fence(*answer);
  if (body.empty()) return std::nullopt;
  if (type == TaskType::Induction && !proposer::defines_f(body)) return std::nullopt;
  return body;
}

Verification verify_abduction(const sandbox::Sandbox& sandbox, const std::string& program,
                              const std::string& gold_output, const std::string& agent_input) {
  auto safety = sandbox.check_input_safety(agent_input);
  if (!safety.safe) return unsafe(safety);
  auto script = sandbox.templates().get(DriverKind::AbductionEval).render(
      {{"code", program}, {"gold_output", gold_output}, {"agent_input", agent_input}});
  return run_verdict(sandbox, script);
}

Verification verify_deduction(const sandbox::Sandbox& sandbox, const std::string& program,
                              const std::string& gold_output, const std::string& agent_output) {
  auto safety = sandbox.check_safety(agent_output);
  if (!safety.safe) return unsafe(safety);
  auto script = sandbox.templates().get(DriverKind::DeductionEval).render(
      {{"code", program},
       {"gold_output", sandbox::python_string_literal(gold_output)},
       {"agent_output", sandbox::python_string_literal(agent_output)}});
  return run_verdict(sandbox, script);
}

Verification verify_induction(const sandbox::Sandbox& sandbox, const std::string& agent_program,
                              const std::vector<IoPair>& pairs) {
  auto safety = sandbox.check_safety(agent_program);
  if (!safety.safe) return unsafe(safety);
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  for (const auto& pair : pairs) {
    inputs.push_back(pair.input);
    outputs.push_back(pair.output);
  }
  auto script = sandbox.templates().get(DriverKind::InductionEval).render(
      {{"code", agent_program},
       {"gold_inputs", sandbox::python_string_list(inputs)},
       {"gold_outputs", sandbox::python_string_list(outputs)}});
  return run_verdict(sandbox, script);
}

Verification verify_answer(const sandbox::Sandbox& sandbox, const SolverQuery& query,
                           const std::string& answer) {
  switch (query.task_type) {
    case TaskType::Abduction: {
      const auto& t = std::get<Triplet>(query.source);
      return verify_abduction(sandbox, t.program, t.output, answer);
    }
    case TaskType::Deduction: {
      const auto& t = std::get<Triplet>(query.source);
      return verify_deduction(sandbox, t.program, t.output, answer);
    }
    case TaskType::Induction:
      return verify_induction(sandbox, answer, std::get<InductionTask>(query.source).pairs);
  }
  throw Error("unknown task type");
}

}  // namespace azr::solver
