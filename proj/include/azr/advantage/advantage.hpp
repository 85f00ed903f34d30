#pragma once

#include <array>
#include <vector>

#include <nlohmann/json.hpp>

#include "azr/core/types.hpp"

namespace azr::advantage {

inline constexpr double kEpsilon = 1e-8;

struct BaselineStats {
  GroupKey group{TaskType::Deduction, Role::Propose};
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

/// z-score with a zero-variance guard: (r - mean) / std when std > kEpsilon,
/// else 0.
double normalize(double reward, double mean, double std);

/// Per-(task type, role) normalization over this batch. Returns the stats
/// of every nonempty group.
std::vector<BaselineStats> compute_trr(std::vector<RolloutRecord>& records);

/// One mean and std over the whole batch.
BaselineStats compute_global_baseline(std::vector<RolloutRecord>& records);

/// Per-group statistics accumulated across batches (Welford). Each batch is
/// folded in before its advantages are computed.
class RunningBaselines {
 public:
  std::vector<BaselineStats> apply(std::vector<RolloutRecord>& records);

  nlohmann::json to_json() const;
  void from_json(const nlohmann::json& state);

 private:
  struct Accumulator {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::array<Accumulator, kGroupCount> groups_{};
};

}  // namespace azr::advantage
