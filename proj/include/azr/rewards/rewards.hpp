#pragma once

#include <cstddef>
#include <optional>

#include "azr/core/types.hpp"
#include "azr/policy/policy.hpp"
#include "azr/sandbox/sandbox.hpp"
#include "azr/solver/solver.hpp"

namespace azr::rewards {

/// Learnability reward: 0 when the task is never or always solved, otherwise
/// 1 - solve_rate. Throws azr::Error outside [0, 1].
double proposer_reward(double solve_rate);

/// 1 for a correct answer, 0 otherwise.
double solver_reward(bool correct);

/// Final reward of a rollout.
///
///   format error                          -1
///   proposer failing validation           -1
///   proposer, valid                       raw (in [0, 1])
///   solver, formatted, raw == 0           -0.5
///   solver, formatted, raw > 0            raw
///
/// `passed_filters` is ignored for the solver role.
double composite_reward(Role role, ParseStatus status, bool passed_filters, double raw);

struct RewardBreakdown {
  Role role = Role::Propose;
  TaskType task_type = TaskType::Deduction;
  double raw = 0.0;
  double composite = 0.0;
  std::optional<double> solve_rate;  // proposer only
  std::size_t rollouts = 0;
};

struct SolveRateEstimate {
  double rate = 0.0;
  std::size_t successes = 0;
  std::size_t rollouts = 0;
  std::size_t transport_failures = 0;
};

/// Monte Carlo solve rate over `samples` independent solver rollouts. A
/// rollout whose generate() throws TransportError is retried once and then
/// counted as a failure; if every rollout fails that way the TransportError
/// is rethrown.
SolveRateEstimate estimate_solve_rate(policy::Policy& policy, const sandbox::Sandbox& sandbox,
                                      const solver::SolverQuery& query, std::size_t samples,
                                      const policy::SamplingParams& params);

}  // namespace azr::rewards
