#include "azr/rewards/rewards.hpp"

#include <fmt/format.h>

#include <atomic>

#include "azr/core/parallel.hpp"

namespace azr::rewards {

double proposer_reward(double solve_rate) {
  if (!(solve_rate >= 0.0 && solve_rate <= 1.0)) {
    throw Error(fmt::format("solve rate {} outside [0, 1]", solve_rate));
  }
  if (solve_rate == 0.0) return 0.0;
  return 1.0 - solve_rate;
}

double solver_reward(bool correct) { return correct ? 1.0 : 0.0; }

double composite_reward(Role role, ParseStatus status, bool passed_filters, double raw) {
  if (!(raw >= 0.0 && raw <= 1.0)) throw Error(fmt::format("role reward {} outside [0, 1]", raw));
  if (status == ParseStatus::FormatError) return -1.0;
  if (role == Role::Propose) return passed_filters ? raw : -1.0;
  return raw == 0.0 ? -0.5 : raw;
}

SolveRateEstimate estimate_solve_rate(policy::Policy& policy, const sandbox::Sandbox& sandbox,
                                      const solver::SolverQuery& query, std::size_t samples,
                                      const policy::SamplingParams& params) {
  if (samples == 0) throw Error("solve rate needs at least one rollout");
  if (params.temperature <= 0.0) throw Error("solve rate rollouts need a non-zero temperature");

  policy::GenerationRequest request{query.prompt, params, policy::PromptTag{Role::Solve, query.task_type}};
  std::vector<std::optional<std::string>> responses(samples);
  std::exception_ptr last_transport;
  std::atomic<std::size_t> failures{0};
  std::mutex failure_mutex;

  parallel_for(samples, policy.max_in_flight(), [&](std::size_t i) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        responses[i] = policy.generate(request).response;
        return;
      } catch (const policy::TransportError&) {
        if (attempt == 1) {
          ++failures;
          std::lock_guard lock(failure_mutex);
          last_transport = std::current_exception();
        }
      }
    }
  });
  if (failures == samples) std::rethrow_exception(last_transport);

  std::vector<char> correct(samples, 0);
  parallel_for(samples, sandbox.config().workers, [&](std::size_t i) {
    if (!responses[i]) return;
    auto answer = solver::parse_answer(*responses[i], query.task_type);
    if (!answer) return;
    correct[i] = solver::verify_answer(sandbox, query, *answer).correct ? 1 : 0;
  });

  SolveRateEstimate estimate;
  estimate.rollouts = samples;
  estimate.transport_failures = failures;
  for (char c : correct) estimate.successes += c ? 1 : 0;
  estimate.rate = static_cast<double>(estimate.successes) / static_cast<double>(samples);
  return estimate;
}

}  // namespace azr::rewards
