#include "azr/advantage/advantage.hpp"

#include <cmath>

namespace azr::advantage {

namespace {

BaselineStats stats_of(GroupKey group, const std::vector<const RolloutRecord*>& members) {
  BaselineStats stats;
  stats.group = group;
  stats.count = members.size();
  if (members.empty()) return stats;
  double sum = 0.0;
  for (const auto* r : members) sum += r->reward;
  stats.mean = sum / static_cast<double>(members.size());
  double squares = 0.0;
  for (const auto* r : members) squares += (r->reward - stats.mean) * (r->reward - stats.mean);
  stats.std = std::sqrt(squares / static_cast<double>(members.size()));
  return stats;
}

}  // namespace

double normalize(double reward, double mean, double std) {
  return std > kEpsilon ? (reward - mean) / std : 0.0;
}

std::vector<BaselineStats> compute_trr(std::vector<RolloutRecord>& records) {
  std::array<std::vector<const RolloutRecord*>, kGroupCount> members;
  for (const auto& r : records) members[group_index({r.task_type, r.role})].push_back(&r);

  std::vector<BaselineStats> out;
  std::array<BaselineStats, kGroupCount> by_group;
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    by_group[g] = stats_of(group_from_index(g), members[g]);
    if (by_group[g].count > 0) out.push_back(by_group[g]);
  }
  for (auto& r : records) {
    const auto& s = by_group[group_index({r.task_type, r.role})];
    r.advantage = normalize(r.reward, s.mean, s.std);
  }
  return out;
}

BaselineStats compute_global_baseline(std::vector<RolloutRecord>& records) {
  std::vector<const RolloutRecord*> all;
  for (const auto& r : records) all.push_back(&r);
  auto stats = stats_of({TaskType::Deduction, Role::Propose}, all);
  for (auto& r : records) r.advantage = normalize(r.reward, stats.mean, stats.std);
  return stats;
}

std::vector<BaselineStats> RunningBaselines::apply(std::vector<RolloutRecord>& records) {
  for (const auto& r : records) {
    auto& acc = groups_[group_index({r.task_type, r.role})];
    ++acc.count;
    double delta = r.reward - acc.mean;
    acc.mean += delta / static_cast<double>(acc.count);
    acc.m2 += delta * (r.reward - acc.mean);
  }
  std::vector<BaselineStats> out;
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    const auto& acc = groups_[g];
    if (acc.count == 0) continue;
    out.push_back({group_from_index(g), acc.mean, std::sqrt(acc.m2 / static_cast<double>(acc.count)),
                   acc.count});
  }
  for (auto& r : records) {
    const auto& acc = groups_[group_index({r.task_type, r.role})];
    r.advantage = normalize(r.reward, acc.mean, std::sqrt(acc.m2 / static_cast<double>(acc.count)));
  }
  return out;
}

nlohmann::json RunningBaselines::to_json() const {
  auto out = nlohmann::json::array();
  for (const auto& acc : groups_) out.push_back({acc.count, acc.mean, acc.m2});
  return out;
}

void RunningBaselines::from_json(const nlohmann::json& state) {
  if (!state.is_array() || state.size() != kGroupCount) throw Error("malformed running baseline state");
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    groups_[g] = {state[g][0].get<std::size_t>(), state[g][1].get<double>(), state[g][2].get<double>()};
  }
}

}  // namespace azr::advantage
