#include "azr/proposer/proposer.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include <algorithm>

#include "azr/core/parallel.hpp"

namespace azr::proposer {

namespace {

std::string render_references(const std::vector<TaskRecord>& references, std::size_t first) {
  std::string out;
  for (std::size_t i = first; i < references.size(); ++i) {
    const auto& t = std::get<Triplet>(references[i]);
    out += fmt::format("<snippet_{0}>\n```python\n{1}\n```\n```input\n{2}\n```\n```output\n{3}\n```\n</snippet_{0}>\n",
                       i - first, trim(t.program), t.input, t.output);
  }
  return out;
}

std::string tag_list(const std::vector<std::string>& forbidden) {
  return fmt::format("{}", fmt::join(forbidden, ", "));
}

}  // namespace

std::string build_proposer_prompt(TaskType type, const std::vector<TaskRecord>& references,
                                  const PromptLibrary& prompts,
                                  const std::vector<std::string>& forbidden,
                                  std::size_t induction_inputs, std::size_t max_prompt_tokens,
                                  std::size_t* kept) {
  if (references.empty()) throw Error("proposer prompt needs at least one reference");
  if (type == TaskType::Induction) {
    if (kept) *kept = 1;
    return prompts.render(Role::Propose, type,
                          {{"program", trim(program_of(references.front()))},
                           {"num_inputs", std::to_string(induction_inputs)},
                           {"forbidden_modules", tag_list(forbidden)}});
  }
  std::size_t first = 0;
  std::string prompt;
  while (true) {
    prompt = prompts.render(Role::Propose, type,
                            {{"references", render_references(references, first)},
                             {"forbidden_modules", tag_list(forbidden)}});
    if (estimate_tokens(prompt) <= max_prompt_tokens || first + 1 >= references.size()) break;
    ++first;
  }
  if (kept) *kept = references.size() - first;
  return prompt;
}

Proposer::Proposer(const sandbox::Sandbox& sandbox, const PromptLibrary& prompts,
                   ProposerSettings settings)
    : sandbox_(sandbox), prompts_(prompts), settings_(std::move(settings)) {
  if (settings_.batch_size == 0) throw Error("batch size must be at least 1");
  if (settings_.seed_factor == 0) throw Error("seed factor must be at least 1");
  if (settings_.references == 0) throw Error("reference count must be at least 1");
}

std::vector<TaskRecord> Proposer::sample_references(const TaskBuffer& buffer, Rng& rng) const {
  auto indices = buffer.sample_indices(settings_.references, rng);
  // Oldest first, so prompt truncation drops the oldest references.
  std::sort(indices.begin(), indices.end());
  std::vector<TaskRecord> out;
  out.reserve(indices.size());
  for (std::size_t index : indices) out.push_back(buffer.at(index));
  return out;
}

std::vector<Proposal> Proposer::generate(policy::Policy& policy,
                                         const std::vector<Pending>& pending) const {
  std::vector<Proposal> proposals(pending.size());
  parallel_for(pending.size(), policy.max_in_flight(), [&](std::size_t i) {
    auto& p = proposals[i];
    p.task_type = pending[i].type;
    p.slot = pending[i].slot;
    p.references = pending[i].references;
    std::size_t kept = p.references.size();
    p.prompt = build_proposer_prompt(p.task_type, p.references, prompts_, sandbox_.config().forbidden,
                                     settings_.induction_inputs, settings_.max_prompt_tokens, &kept);
    p.references.erase(p.references.begin(),
                       p.references.end() - static_cast<std::ptrdiff_t>(kept));
    try {
      auto transcript =
          policy.generate({p.prompt, settings_.sampling, policy::PromptTag{Role::Propose, p.task_type}});
      p.response = std::move(transcript.response);
      p.usage = transcript.usage;
      p.parse = parse_proposal(p.response, p.task_type);
    } catch (const policy::TransportError& e) {
      p.transport_failed = true;
      p.parse.task_type = p.task_type;
      p.parse.error = e.what();
    }
  });
  return proposals;
}

std::optional<std::string> Proposer::strip_program(const std::string& program) const {
  std::string error;
  auto stripped = sandbox_.analyze("strip", program, &error);
  if (!stripped || !stripped->is_string()) {
    spdlog::debug("seed strip failed: {}", error);
    return std::nullopt;
  }
  return stripped->get<std::string>();
}

std::optional<TaskRecord> Proposer::validate(const ProposalParse& parse, const std::string& program,
                                             std::string* diagnostic) const {
  auto fail = [&](std::string why) -> std::optional<TaskRecord> {
    if (diagnostic) *diagnostic = std::move(why);
    return std::nullopt;
  };
  if (parse.status != ParseStatus::WellFormatted || !parse.payload) return fail(parse.error);

  if (const auto* code = std::get_if<CodeProposal>(&*parse.payload)) {
    auto verdict = sandbox_.validate_and_construct(code->program, code->input);
    if (!verdict.passed()) return fail(verdict.diagnostic);
    return Triplet{code->program, code->input, *verdict.output};
  }

  const auto& ind = std::get<InductionProposal>(*parse.payload);
  auto safety = sandbox_.check_safety(program);
  if (!safety.safe) return fail(fmt::format("forbidden: {}", fmt::join(safety.offending, ", ")));
  InductionTask task{program, {}, ind.message};
  for (const auto& input : ind.inputs) {
    auto input_safety = sandbox_.check_input_safety(input);
    if (!input_safety.safe) {
      return fail(fmt::format("input {}: forbidden: {}", input, fmt::join(input_safety.offending, ", ")));
    }
    auto verdict = sandbox_.validate_execution(program, input);
    if (!verdict.passed()) return fail(fmt::format("input {}: {}", input, verdict.diagnostic));
    task.pairs.push_back({input, *verdict.output});
  }
  return task;
}

BufferSet Proposer::seed_buffers(policy::Policy& policy, Rng& rng, std::size_t capacity) const {
  const std::size_t target = settings_.batch_size * settings_.seed_factor;
  if (target > capacity) throw Error("seed set does not fit in the buffer capacity");
  const std::size_t workers = sandbox_.config().workers;

  TaskBuffer seed(TaskType::Deduction, capacity);
  for (std::size_t round = 0; round < settings_.max_seed_rounds && seed.size() < target; ++round) {
    std::vector<Pending> pending;
    for (std::size_t i = 0; i < settings_.batch_size; ++i) {
      TaskType type = i % 2 == 0 ? TaskType::Deduction : TaskType::Abduction;
      std::vector<TaskRecord> refs =
          seed.empty() ? std::vector<TaskRecord>{zero_triplet()} : sample_references(seed, rng);
      pending.push_back({type, i, std::move(refs)});
    }
    auto proposals = generate(policy, pending);
    for (const auto& p : proposals) {
      if (p.transport_failed) throw policy::TransportError("seeding aborted: " + p.parse.error);
    }
    std::vector<std::optional<TaskRecord>> tasks(proposals.size());
    parallel_for(proposals.size(), workers, [&](std::size_t i) {
      const auto& parse = proposals[i].parse;
      if (parse.status != ParseStatus::WellFormatted) return;
      auto code = std::get<CodeProposal>(*parse.payload);
      auto stripped = strip_program(code.program);
      if (!stripped) return;
      ProposalParse cleaned = parse;
      cleaned.payload = CodeProposal{*stripped, code.input};
      tasks[i] = validate(cleaned, {});
    });
    for (auto& task : tasks) {
      if (task && seed.size() < target) seed.insert(std::move(*task));
    }
    spdlog::info("seeding round {}: {}/{} triplets", round + 1, seed.size(), target);
  }
  if (seed.size() < target) {
    throw Error(fmt::format("seeding produced {} of {} triplets in {} rounds", seed.size(), target,
                            settings_.max_seed_rounds));
  }

  BufferSet buffers(capacity);
  for (const auto& item : seed.items()) {
    buffers.deduction.insert(item);
    buffers.abduction.insert(item);
  }

  for (std::size_t round = 0; round < settings_.max_seed_rounds && buffers.induction.size() < target;
       ++round) {
    std::vector<Pending> pending;
    for (std::size_t i = 0; i < settings_.batch_size; ++i) {
      pending.push_back({TaskType::Induction, i, {seed.at(uniform_index(rng, seed.size()))}});
    }
    auto proposals = generate(policy, pending);
    for (const auto& p : proposals) {
      if (p.transport_failed) throw policy::TransportError("seeding aborted: " + p.parse.error);
    }
    std::vector<std::optional<TaskRecord>> tasks(proposals.size());
    parallel_for(proposals.size(), workers, [&](std::size_t i) {
      tasks[i] = validate(proposals[i].parse, program_of(proposals[i].references.front()));
    });
    for (auto& task : tasks) {
      if (task && buffers.induction.size() < target) buffers.induction.insert(std::move(*task));
    }
    spdlog::info("induction seeding round {}: {}/{} tasks", round + 1, buffers.induction.size(), target);
  }
  if (buffers.induction.size() < target) {
    throw Error(fmt::format("induction seeding produced {} of {} tasks in {} rounds",
                            buffers.induction.size(), target, settings_.max_seed_rounds));
  }
  return buffers;
}

ProposePhaseResult Proposer::propose_phase(policy::Policy& policy, BufferSet& buffers, Rng& rng) const {
  auto abd = buffers.abduction.items();
  auto ded = buffers.deduction.items();
  if (abd.empty() || ded.empty()) throw EmptyBufferError("propose phase needs seeded buffers");

  std::vector<Pending> pending;
  for (std::size_t slot = 0; slot < settings_.batch_size; ++slot) {
    std::size_t pick = uniform_index(rng, abd.size() + ded.size());
    const TaskRecord& program = pick < abd.size() ? abd[pick] : ded[pick - abd.size()];
    pending.push_back({TaskType::Induction, slot, {program}});
    pending.push_back({TaskType::Deduction, slot, sample_references(buffers.deduction, rng)});
    pending.push_back({TaskType::Abduction, slot, sample_references(buffers.abduction, rng)});
  }

  ProposePhaseResult result;
  result.proposals = generate(policy, pending);
  parallel_for(result.proposals.size(), sandbox_.config().workers, [&](std::size_t i) {
    auto& p = result.proposals[i];
    if (p.transport_failed) {
      p.diagnostic = "transport: " + p.parse.error;
      return;
    }
    const std::string program =
        p.task_type == TaskType::Induction ? program_of(p.references.front()) : std::string();
    p.task = validate(p.parse, program, &p.diagnostic);
  });
  for (auto& p : result.proposals) {
    if (!p.task) continue;
    if (buffers.of(p.task_type).insert(*p.task) == InsertResult::Inserted) {
      p.inserted = true;
      result.inserted[static_cast<std::size_t>(p.task_type)].push_back(*p.task);
    }
  }
  return result;
}

}  // namespace azr::proposer
