#include <doctest.h>

#include "azr/rewards/rewards.hpp"
#include "support.hpp"

using namespace azr;
using namespace azr::rewards;
using azr::test::answer_response;
using azr::test::shared_sandbox;

namespace {

class AlwaysFailing : public policy::Policy {
 public:
  policy::PolicyTranscript generate(const policy::GenerationRequest&) override {
    ++calls;
    throw policy::TransportError("down");
  }
  int calls = 0;
};

solver::SolverQuery deduction_query() {
  static const proposer::PromptLibrary prompts;
  return solver::make_query(TaskType::Deduction, Triplet{"def f(x):\n    return x * 3\n", "2", "6"}, prompts, {});
}

}  // namespace

TEST_SUITE("rewards") {
  TEST_CASE("learnability reward") {
    CHECK(proposer_reward(0.0) == 0.0);
    CHECK(proposer_reward(1.0) == 0.0);
    CHECK(proposer_reward(0.25) == 0.75);
    CHECK(proposer_reward(0.5) == 0.5);
    CHECK_THROWS_AS(proposer_reward(-0.1), Error);
    CHECK_THROWS_AS(proposer_reward(1.5), Error);
  }

  TEST_CASE("composite reward table") {
    CHECK(composite_reward(Role::Propose, ParseStatus::FormatError, false, 0.0) == -1.0);
    CHECK(composite_reward(Role::Propose, ParseStatus::WellFormatted, false, 0.0) == -1.0);
    CHECK(composite_reward(Role::Propose, ParseStatus::WellFormatted, true, 0.0) == 0.0);
    CHECK(composite_reward(Role::Propose, ParseStatus::WellFormatted, true, 0.625) == 0.625);
    CHECK(composite_reward(Role::Solve, ParseStatus::FormatError, true, 1.0) == -1.0);
    CHECK(composite_reward(Role::Solve, ParseStatus::WellFormatted, false, 0.0) == -0.5);
    CHECK(composite_reward(Role::Solve, ParseStatus::WellFormatted, false, 1.0) == 1.0);
    CHECK(solver_reward(true) == 1.0);
    CHECK(solver_reward(false) == 0.0);
  }

  TEST_CASE("solve rate counts verified rollouts") {
    // Two of eight answers are right; one is malformed and counts as wrong.
    auto policy = azr::test::tag_policy(
        {{"solve/deduction",
          {answer_response("6"), answer_response("7"), "no tags", answer_response("5"), answer_response("6"),
           answer_response("0"), answer_response("'6'"), answer_response("1")}}});
    policy::SamplingParams params;
    auto estimate = estimate_solve_rate(*policy, shared_sandbox(), deduction_query(), 8, params);
    CHECK(estimate.rollouts == 8);
    CHECK(estimate.successes == 2);
    CHECK(estimate.rate == 0.25);
    CHECK(proposer_reward(estimate.rate) == 0.75);
  }

  TEST_CASE("solve rate needs sampling") {
    auto policy = azr::test::tag_policy({{"solve/deduction", {answer_response("6")}}});
    policy::SamplingParams greedy;
    greedy.temperature = 0.0;
    CHECK_THROWS_AS(estimate_solve_rate(*policy, shared_sandbox(), deduction_query(), 4, greedy), Error);
  }

  TEST_CASE("all transport failures propagate") {
    AlwaysFailing policy;
    CHECK_THROWS_AS(estimate_solve_rate(policy, shared_sandbox(), deduction_query(), 3, {}), policy::TransportError);
    CHECK(policy.calls == 6);
  }
}
