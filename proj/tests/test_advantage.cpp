#include <doctest.h>

#include <cmath>
#include <random>

#include "azr/advantage/advantage.hpp"

using namespace azr;
using namespace azr::advantage;

namespace {

RolloutRecord record(TaskType type, Role role, double reward) {
  RolloutRecord r;
  r.task_type = type;
  r.role = role;
  r.reward = reward;
  return r;
}

}  // namespace

TEST_SUITE("advantage") {
  TEST_CASE("small group by hand") {
    std::vector<RolloutRecord> batch = {record(TaskType::Deduction, Role::Solve, 1.0),
                                        record(TaskType::Deduction, Role::Solve, 0.0),
                                        record(TaskType::Deduction, Role::Solve, 1.0)};
    auto stats = compute_trr(batch);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].mean == doctest::Approx(2.0 / 3.0));
    CHECK(stats[0].std == doctest::Approx(std::sqrt(2.0) / 3.0));
    CHECK(batch[0].advantage == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(batch[1].advantage == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
    CHECK(batch[2].advantage == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("equal rewards give zero advantage") {
    std::vector<RolloutRecord> batch(5, record(TaskType::Induction, Role::Propose, 0.375));
    batch.push_back(record(TaskType::Abduction, Role::Solve, -1.0));
    compute_trr(batch);
    for (const auto& r : batch) CHECK(r.advantage == 0.0);
    CHECK(normalize(1.0, 1.0, 0.0) == 0.0);
    CHECK(normalize(1.0, 0.0, kEpsilon / 2) == 0.0);
  }

  TEST_CASE("groups are normalized independently") {
    std::vector<RolloutRecord> batch = {record(TaskType::Abduction, Role::Propose, 0.0),
                                        record(TaskType::Abduction, Role::Solve, 1.0),
                                        record(TaskType::Abduction, Role::Propose, 1.0),
                                        record(TaskType::Abduction, Role::Solve, -0.5)};
    auto stats = compute_trr(batch);
    CHECK(stats.size() == 2);
    CHECK(batch[0].advantage == doctest::Approx(-1.0));
    CHECK(batch[2].advantage == doctest::Approx(1.0));
    CHECK(batch[1].advantage == doctest::Approx(1.0));
    CHECK(batch[3].advantage == doctest::Approx(-1.0));
  }

  TEST_CASE("advantages are invariant to shift and positive scale within a group") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<RolloutRecord> a, b;
    for (int i = 0; i < 40; ++i) {
      auto type = kAllTaskTypes[i % 3];
      auto role = kAllRoles[(i / 3) % 2];
      double r = u(rng);
      a.push_back(record(type, role, r));
      b.push_back(record(type, role, 3.0 * r + 7.0));
    }
    compute_trr(a);
    compute_trr(b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].advantage == doctest::Approx(b[i].advantage).epsilon(1e-9));
  }

  TEST_CASE("global baseline pools every group") {
    std::vector<RolloutRecord> batch = {record(TaskType::Abduction, Role::Propose, 0.0),
                                        record(TaskType::Deduction, Role::Solve, 2.0)};
    auto g = compute_global_baseline(batch);
    CHECK(g.mean == 1.0);
    CHECK(g.std == 1.0);
    CHECK(batch[0].advantage == -1.0);
    CHECK(batch[1].advantage == 1.0);
    // Per-group, both are singletons and get zero.
    compute_trr(batch);
    CHECK(batch[0].advantage == 0.0);
  }

  TEST_CASE("running baselines accumulate across batches and round trip") {
    RunningBaselines running;
    std::vector<RolloutRecord> first = {record(TaskType::Deduction, Role::Solve, 0.0),
                                        record(TaskType::Deduction, Role::Solve, 1.0)};
    running.apply(first);
    CHECK(first[0].advantage == doctest::Approx(-1.0));

    RunningBaselines restored;
    restored.from_json(running.to_json());
    std::vector<RolloutRecord> second = {record(TaskType::Deduction, Role::Solve, 1.0),
                                         record(TaskType::Deduction, Role::Solve, 1.0)};
    auto stats = restored.apply(second);
    // Pooled rewards {0, 1, 1, 1}: mean 0.75, population std sqrt(3)/4.
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].mean == doctest::Approx(0.75));
    CHECK(stats[0].std == doctest::Approx(std::sqrt(3.0) / 4.0));
    CHECK(second[0].advantage == doctest::Approx(0.25 / (std::sqrt(3.0) / 4.0)));
  }
}
