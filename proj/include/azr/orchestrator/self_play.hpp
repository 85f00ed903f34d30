#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "azr/advantage/advantage.hpp"
#include "azr/core/buffer.hpp"
#include "azr/metrics/metrics.hpp"
#include "azr/orchestrator/config.hpp"
#include "azr/orchestrator/experience.hpp"
#include "azr/policy/policy.hpp"
#include "azr/proposer/proposer.hpp"
#include "azr/sandbox/sandbox.hpp"

namespace azr::orchestrator {

/// Raised when a run cannot continue; carries the failing iteration.
class RunError : public Error {
 public:
  RunError(std::int64_t iteration, const std::string& what);
  std::int64_t iteration() const noexcept { return iteration_; }

 private:
  std::int64_t iteration_;
};

/// File layout under the output directory.
struct RunPaths {
  explicit RunPaths(std::filesystem::path dir);

  std::filesystem::path dir;
  std::filesystem::path buffer(TaskType type) const;
  std::filesystem::path experience() const { return dir / "experience.jsonl"; }
  std::filesystem::path metrics() const { return dir / "metrics.jsonl"; }
  std::filesystem::path summary() const { return dir / "summary.jsonl"; }
  std::filesystem::path state() const { return dir / "state.json"; }
};

struct RunReport {
  std::size_t iterations_completed = 0;
  std::size_t iterations_this_call = 0;
  bool resumed = false;
  std::size_t records_emitted = 0;
  std::array<std::size_t, 3> buffer_sizes{};
};

std::shared_ptr<policy::Policy> make_policy(const RunConfig& config);

/// Seeding followed by T iterations of propose, solve, reward, advantage
/// and emission.
///
/// After seeding and after every iteration a manifest (state.json) records
/// the byte length of every output file together with the rng, policy and
/// tracker state. A run that finds a manifest resumes from it: output files
/// are cut back to the recorded lengths, so a crash mid-iteration leaves no
/// trace and the iteration is replayed from the same state.
class SelfPlay {
 public:
  SelfPlay(RunConfig config, std::shared_ptr<policy::Policy> policy);

  /// Fresh seeding only; replaces any previous run in the output directory.
  RunReport seed();

  /// Resumes or starts a run and executes up to config.iterations in total.
  RunReport run();

  const BufferSet& buffers() const noexcept { return buffers_; }
  const RunPaths& paths() const noexcept { return paths_; }

 private:
  ExperienceBatch iteration(std::int64_t t);
  std::vector<metrics::TaskMetrics> task_metrics(const proposer::ProposePhaseResult& proposed);
  void assign_advantages(std::vector<RolloutRecord>& records);
  void write_manifest(std::size_t completed) const;
  bool restore_manifest();
  void reset_outputs() const;

  RunConfig config_;
  std::shared_ptr<policy::Policy> policy_;
  sandbox::Sandbox sandbox_;
  proposer::PromptLibrary prompts_;
  proposer::Proposer proposer_;
  RunPaths paths_;
  Rng rng_;
  BufferSet buffers_;
  std::size_t completed_ = 0;
  advantage::RunningBaselines running_;
  std::array<metrics::AnswerDiversityTracker, 3> diversity_;
};

}  // namespace azr::orchestrator
