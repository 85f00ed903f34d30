#include "azr/orchestrator/self_play.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <sstream>

#include "azr/core/jsonl.hpp"
#include "azr/core/parallel.hpp"
#include "azr/policy/chat_client.hpp"
#include "azr/policy/scripted_policy.hpp"
#include "azr/rewards/rewards.hpp"
#include "azr/solver/solver.hpp"

namespace azr::orchestrator {

namespace fs = std::filesystem;

namespace {

constexpr int kManifestVersion = 1;

std::size_t tokens_of(const std::string& response, const std::optional<policy::TokenUsage>& usage) {
  if (usage && usage->completion_tokens > 0) return static_cast<std::size_t>(usage->completion_tokens);
  return proposer::estimate_tokens(response);
}

std::uintmax_t file_length(const fs::path& path) {
  std::error_code ec;
  auto size = fs::file_size(path, ec);
  return ec ? 0 : size;
}

std::string rng_state(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

// The answer whose repetition the diversity metric tracks.
std::optional<std::string> task_answer(TaskType type, const TaskRecord& task) {
  if (type == TaskType::Deduction) return std::get<Triplet>(task).output;
  if (type == TaskType::Abduction) return std::get<Triplet>(task).input;
  return std::nullopt;
}

}  // namespace

RunError::RunError(std::int64_t iteration, const std::string& what)
    : Error(fmt::format("iteration {}: {}", iteration, what)), iteration_(iteration) {}

RunPaths::RunPaths(fs::path d) : dir(std::move(d)) {}

fs::path RunPaths::buffer(TaskType type) const {
  return dir / fmt::format("buffer_{}.jsonl", to_string(type));
}

std::shared_ptr<policy::Policy> make_policy(const RunConfig& config) {
  if (config.policy_kind == PolicyKind::Mock) return policy::mock_from_script(config.mock_script);
  if (config.remote.model.empty()) throw ConfigError("policy.model is required for the remote policy");
  return std::make_shared<policy::ChatCompletionsClient>(config.remote);
}

SelfPlay::SelfPlay(RunConfig config, std::shared_ptr<policy::Policy> policy)
    : config_(std::move(config)),
      policy_(std::move(policy)),
      sandbox_(config_.sandbox),
      prompts_(config_.prompt_dir),
      proposer_(sandbox_, prompts_, config_.proposer),
      paths_(config_.output_dir),
      rng_(config_.seed),
      buffers_(config_.buffer_capacity) {
  config_.check();
  if (!policy_) throw Error("self-play needs a policy");
}

void SelfPlay::reset_outputs() const {
  fs::create_directories(paths_.dir);
  for (const auto& file : {paths_.experience(), paths_.metrics(), paths_.summary(), paths_.state()}) {
    fs::remove(file);
  }
  for (TaskType type : kAllTaskTypes) fs::remove(paths_.buffer(type));
}

void SelfPlay::write_manifest(std::size_t completed) const {
  nlohmann::json offsets = {{"experience", file_length(paths_.experience())},
                            {"metrics", file_length(paths_.metrics())},
                            {"summary", file_length(paths_.summary())}};
  for (TaskType type : kAllTaskTypes) {
    offsets[fmt::format("buffer_{}", to_string(type))] = file_length(paths_.buffer(type));
  }
  nlohmann::json diversity = nlohmann::json::array();
  for (const auto& tracker : diversity_) diversity.push_back(tracker.to_json());
  nlohmann::json manifest = {{"version", kManifestVersion},
                             {"seed", config_.seed},
                             {"iterations_completed", completed},
                             {"rng", rng_state(rng_)},
                             {"policy", policy_->checkpoint()},
                             {"offsets", offsets},
                             {"running_baselines", running_.to_json()},
                             {"answer_diversity", diversity}};
  auto tmp = paths_.state();
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
  }
  fs::rename(tmp, paths_.state());
}

bool SelfPlay::restore_manifest() {
  if (!fs::exists(paths_.state())) return false;
  nlohmann::json manifest;
  try {
    std::ifstream in(paths_.state(), std::ios::binary);
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("unreadable run manifest {}: {}", paths_.state().string(), e.what()));
  }
  if (manifest.value("version", 0) != kManifestVersion) throw Error("unsupported run manifest version");
  if (manifest.at("seed").get<std::uint64_t>() != config_.seed) {
    throw Error("run manifest was written with a different seed");
  }

  const auto& offsets = manifest.at("offsets");
  auto cut = [&](const fs::path& file, const std::string& key) {
    auto length = offsets.at(key).get<std::uintmax_t>();
    if (file_length(file) < length) {
      throw Error(fmt::format("{} is shorter than the manifest records", file.string()));
    }
    if (fs::exists(file)) fs::resize_file(file, length);
  };
  cut(paths_.experience(), "experience");
  cut(paths_.metrics(), "metrics");
  cut(paths_.summary(), "summary");
  for (TaskType type : kAllTaskTypes) {
    cut(paths_.buffer(type), fmt::format("buffer_{}", to_string(type)));
    buffers_.of(type) = load_buffer(paths_.buffer(type), type, config_.buffer_capacity);
  }

  std::istringstream rng_in(manifest.at("rng").get<std::string>());
  rng_in >> rng_;
  if (!rng_in) throw Error("corrupt rng state in run manifest");
  policy_->restore(manifest.at("policy"));
  running_.from_json(manifest.at("running_baselines"));
  const auto& diversity = manifest.at("answer_diversity");
  for (std::size_t i = 0; i < diversity_.size(); ++i) diversity_[i].from_json(diversity.at(i));
  completed_ = manifest.at("iterations_completed").get<std::size_t>();
  return true;
}

RunReport SelfPlay::seed() {
  reset_outputs();
  sandbox_.self_check();
  try {
    buffers_ = proposer_.seed_buffers(*policy_, rng_, config_.buffer_capacity);
  } catch (const policy::TransportError& e) {
    throw RunError(-1, fmt::format("seeding: {}", e.what()));
  }
  for (TaskType type : kAllTaskTypes) save_buffer(paths_.buffer(type), buffers_.of(type));
  completed_ = 0;
  write_manifest(0);

  RunReport report;
  for (TaskType type : kAllTaskTypes) {
    report.buffer_sizes[static_cast<std::size_t>(type)] = buffers_.of(type).size();
  }
  return report;
}

RunReport SelfPlay::run() {
  RunReport report;
  report.resumed = restore_manifest();
  if (report.resumed) {
    spdlog::info("resuming after {} completed iterations", completed_);
    sandbox_.self_check();
  } else {
    seed();
  }
  while (completed_ < config_.iterations) {
    auto t = static_cast<std::int64_t>(completed_);
    auto batch = iteration(t);
    emit_experience(paths_.experience(), batch);
    append_jsonl(paths_.summary(), {batch.summary()});
    ++completed_;
    write_manifest(completed_);
    report.records_emitted += batch.records.size();
    ++report.iterations_this_call;
    spdlog::info("iteration {} done: {} records, buffers abd={} ded={} ind={}", t, batch.records.size(),
                 buffers_.abduction.size(), buffers_.deduction.size(), buffers_.induction.size());
  }
  report.iterations_completed = completed_;
  for (TaskType type : kAllTaskTypes) {
    report.buffer_sizes[static_cast<std::size_t>(type)] = buffers_.of(type).size();
  }
  return report;
}

void SelfPlay::assign_advantages(std::vector<RolloutRecord>& records) {
  if (config_.running_baselines) {
    running_.apply(records);
  } else if (config_.advantage == AdvantageMode::Global) {
    advantage::compute_global_baseline(records);
  } else {
    advantage::compute_trr(records);
  }
}

std::vector<metrics::TaskMetrics> SelfPlay::task_metrics(const proposer::ProposePhaseResult& proposed) {
  std::vector<metrics::TaskMetrics> out;
  for (const auto& p : proposed.proposals) {
    if (!p.valid()) continue;
    metrics::TaskMetrics m;
    m.task_type = p.task_type;
    m.slot = p.slot;
    std::string error;
    const std::string& program = program_of(*p.task);
    m.complexity = metrics::halstead(sandbox_, program, &error);
    if (!m.complexity) spdlog::debug("halstead unavailable: {}", error);
    if (p.task_type != TaskType::Induction && !p.references.empty()) {
      double sum = 0.0;
      bool fallback = false;
      bool complete = true;
      for (const auto& ref : p.references) {
        auto d = metrics::ast_edit_distance(sandbox_, program, program_of(ref), metrics::kDefaultNodeBudget,
                                            &error);
        if (!d) {
          complete = false;
          break;
        }
        sum += d->value;
        fallback = fallback || d->token_fallback;
      }
      if (complete) m.ast_distance_mean = metrics::AstDistance{sum / static_cast<double>(p.references.size()), fallback};
    }
    if (auto answer = task_answer(p.task_type, *p.task)) {
      m.answer_diversity = diversity_[static_cast<std::size_t>(p.task_type)].observe(*answer);
    }
    out.push_back(std::move(m));
  }
  return out;
}

ExperienceBatch SelfPlay::iteration(std::int64_t t) {
  const std::size_t B = config_.proposer.batch_size;
  const auto& params = config_.proposer.sampling;
  ExperienceBatch batch;
  batch.iteration = t;

  // Propose phase.
  proposer::ProposePhaseResult proposed;
  try {
    proposed = proposer_.propose_phase(*policy_, buffers_, rng_);
  } catch (const sandbox::HarnessError& e) {
    throw RunError(t, fmt::format("sandbox harness failure: {}", e.what()));
  }

  std::array<std::vector<TaskRecord>, 3> fresh;
  for (const auto& p : proposed.proposals) {
    RolloutRecord record;
    record.role = Role::Propose;
    record.task_type = p.task_type;
    record.prompt = p.prompt;
    record.response = p.response;
    record.iteration = t;
    if (p.valid()) {
      fresh[static_cast<std::size_t>(p.task_type)].push_back(*p.task);
      auto query = solver::make_query(p.task_type, *p.task, prompts_, config_.sandbox.forbidden);
      rewards::SolveRateEstimate estimate;
      try {
        estimate = rewards::estimate_solve_rate(*policy_, sandbox_, query, config_.solve_samples, params);
      } catch (const policy::TransportError& e) {
        throw RunError(t, fmt::format("learnability rollouts: {}", e.what()));
      } catch (const sandbox::HarnessError& e) {
        throw RunError(t, fmt::format("sandbox harness failure: {}", e.what()));
      }
      record.parse_status = ParseStatus::WellFormatted;
      record.reward = rewards::composite_reward(Role::Propose, ParseStatus::WellFormatted, true,
                                                rewards::proposer_reward(estimate.rate));
    } else {
      // Failing the filters counts as a format error for the proposer.
      record.parse_status = ParseStatus::FormatError;
      record.reward = rewards::composite_reward(Role::Propose, ParseStatus::FormatError, false, 0.0);
    }
    batch.records.push_back(std::move(record));
    batch.response_tokens.push_back(tokens_of(p.response, p.usage));
  }

  // Solve phase.
  for (TaskType type : kAllTaskTypes) {
    auto queries = solver::build_solver_batch(type, buffers_.of(type), fresh[static_cast<std::size_t>(type)], B,
                                              rng_, prompts_, config_.sandbox.forbidden);
    std::vector<std::optional<policy::PolicyTranscript>> transcripts(queries.size());
    parallel_for(queries.size(), policy_->max_in_flight(), [&](std::size_t i) {
      policy::GenerationRequest request{queries[i].prompt, params, policy::PromptTag{Role::Solve, type}};
      for (int attempt = 0; attempt < 2 && !transcripts[i]; ++attempt) {
        try {
          transcripts[i] = policy_->generate(request);
        } catch (const policy::TransportError& e) {
          spdlog::warn("solver rollout failed (attempt {}): {}", attempt + 1, e.what());
        }
      }
    });
    std::vector<std::optional<std::string>> answers(queries.size());
    std::vector<char> correct(queries.size(), 0);
    try {
      parallel_for(queries.size(), config_.sandbox.workers, [&](std::size_t i) {
        if (!transcripts[i]) return;
        answers[i] = solver::parse_answer(transcripts[i]->response, type);
        if (answers[i]) correct[i] = solver::verify_answer(sandbox_, queries[i], *answers[i]).correct ? 1 : 0;
      });
    } catch (const sandbox::HarnessError& e) {
      throw RunError(t, fmt::format("sandbox harness failure: {}", e.what()));
    }
    for (std::size_t i = 0; i < queries.size(); ++i) {
      RolloutRecord record;
      record.role = Role::Solve;
      record.task_type = type;
      record.prompt = queries[i].prompt;
      record.response = transcripts[i] ? transcripts[i]->response : std::string();
      record.iteration = t;
      record.parse_status = answers[i] ? ParseStatus::WellFormatted : ParseStatus::FormatError;
      record.reward = rewards::composite_reward(Role::Solve, record.parse_status, true,
                                                rewards::solver_reward(correct[i] != 0));
      batch.records.push_back(std::move(record));
      batch.response_tokens.push_back(
          transcripts[i] ? tokens_of(transcripts[i]->response, transcripts[i]->usage) : 0);
    }
  }

  assign_advantages(batch.records);

  if (config_.metrics) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& m : task_metrics(proposed)) tasks.push_back(m.to_json());
    append_jsonl(paths_.metrics(), {{{"iteration", t}, {"tasks", tasks}, {"summary", batch.summary()["groups"]}}});
  }

  for (TaskType type : kAllTaskTypes) {
    const auto& inserted = proposed.inserted_of(type);
    if (!inserted.empty()) append_tasks(paths_.buffer(type), type, inserted);
    batch.buffer_sizes[static_cast<std::size_t>(type)] = buffers_.of(type).size();
  }
  return batch;
}

}  // namespace azr::orchestrator
