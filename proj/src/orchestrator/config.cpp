#include "azr/orchestrator/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace azr::orchestrator {

namespace pt = boost::property_tree;

namespace {

template <typename T>
void read(const pt::ptree& tree, const std::string& key, T& target) {
  try {
    // get_optional swallows conversion failures; get_value reports them.
    if (auto child = tree.get_child_optional(key)) target = child->get_value<T>();
  } catch (const pt::ptree_error& e) {
    throw ConfigError(fmt::format("bad value for {}: {}", key, e.what()));
  }
}

void read_path(const pt::ptree& tree, const std::string& key, const std::filesystem::path& base,
               std::filesystem::path& target) {
  if (auto value = tree.get_optional<std::string>(key)) {
    std::filesystem::path p = boost::algorithm::trim_copy(*value);
    target = p.is_absolute() ? p : base / p;
  }
}

}  // namespace

std::string_view to_string(AdvantageMode mode) {
  return mode == AdvantageMode::Trr ? "trr" : "global";
}

void RunConfig::check() const {
  if (proposer.batch_size == 0) throw ConfigError("loop.batch_size must be at least 1");
  if (proposer.references == 0) throw ConfigError("loop.references must be at least 1");
  if (proposer.seed_factor == 0) throw ConfigError("loop.seed_factor must be at least 1");
  if (proposer.induction_inputs < 2) throw ConfigError("loop.induction_inputs must be at least 2");
  if (solve_samples == 0) throw ConfigError("loop.solve_samples must be at least 1");
  if (buffer_capacity < proposer.batch_size * proposer.seed_factor) {
    throw ConfigError("loop.buffer_capacity is smaller than the seed set");
  }
  if (proposer.sampling.temperature <= 0.0) throw ConfigError("sampling.temperature must be positive");
  if (proposer.sampling.top_p <= 0.0 || proposer.sampling.top_p > 1.0) {
    throw ConfigError("sampling.top_p must be in (0, 1]");
  }
  if (sandbox.determinism_runs < 2) throw ConfigError("sandbox.determinism_runs must be at least 2");
  if (sandbox.workers == 0) throw ConfigError("sandbox.workers must be at least 1");
  if (lambda < 0.0) throw ConfigError("loop.lambda must be nonnegative");
  if (policy_kind == PolicyKind::Mock && mock_script.empty()) {
    throw ConfigError("policy.script is required for the mock policy");
  }
}

RunConfig load_config(const std::filesystem::path& file) {
  pt::ptree tree;
  try {
    pt::read_ini(file.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  const auto base = std::filesystem::absolute(file).parent_path();
  RunConfig c;

  read(tree, "loop.batch_size", c.proposer.batch_size);
  read(tree, "loop.references", c.proposer.references);
  read(tree, "loop.iterations", c.iterations);
  read(tree, "loop.seed_factor", c.proposer.seed_factor);
  read(tree, "loop.solve_samples", c.solve_samples);
  read(tree, "loop.induction_inputs", c.proposer.induction_inputs);
  read(tree, "loop.buffer_capacity", c.buffer_capacity);
  read(tree, "loop.seed", c.seed);
  read(tree, "loop.running_baselines", c.running_baselines);
  read(tree, "loop.lambda", c.lambda);
  read(tree, "loop.metrics", c.metrics);
  read(tree, "loop.max_prompt_tokens", c.proposer.max_prompt_tokens);
  read(tree, "loop.max_seed_rounds", c.proposer.max_seed_rounds);
  if (auto mode = tree.get_optional<std::string>("loop.advantage")) {
    if (*mode == "trr") c.advantage = AdvantageMode::Trr;
    else if (*mode == "global") c.advantage = AdvantageMode::Global;
    else throw ConfigError("loop.advantage must be trr or global");
  }

  read(tree, "sampling.temperature", c.proposer.sampling.temperature);
  read(tree, "sampling.top_p", c.proposer.sampling.top_p);
  read(tree, "sampling.max_response_tokens", c.proposer.sampling.max_response_tokens);

  if (auto python = tree.get_optional<std::string>("sandbox.python")) {
    std::filesystem::path p = *python;
    c.sandbox.python = p.has_parent_path() && p.is_relative() ? base / p : p;
  }
  read_path(tree, "sandbox.harness", base, c.sandbox.harness_dir);
  long timeout_ms = static_cast<long>(c.sandbox.timeout.count());
  read(tree, "sandbox.timeout_ms", timeout_ms);
  c.sandbox.timeout = std::chrono::milliseconds(timeout_ms);
  read(tree, "sandbox.workers", c.sandbox.workers);
  read(tree, "sandbox.determinism_runs", c.sandbox.determinism_runs);
  if (auto list = tree.get_optional<std::string>("sandbox.forbidden")) {
    std::vector<std::string> names;
    boost::algorithm::split(names, *list, boost::is_any_of(","));
    c.sandbox.forbidden.clear();
    for (auto& n : names) {
      boost::algorithm::trim(n);
      if (!n.empty()) c.sandbox.forbidden.push_back(n);
    }
  }

  if (auto kind = tree.get_optional<std::string>("policy.kind")) {
    if (*kind == "mock") c.policy_kind = PolicyKind::Mock;
    else if (*kind == "remote") c.policy_kind = PolicyKind::Remote;
    else throw ConfigError("policy.kind must be mock or remote");
  }
  read_path(tree, "policy.script", base, c.mock_script);
  read(tree, "policy.base_url", c.remote.base_url);
  read(tree, "policy.model", c.remote.model);
  read(tree, "policy.api_key_env", c.remote.api_key_env);
  read(tree, "policy.max_in_flight", c.remote.max_in_flight);
  read(tree, "policy.max_retries", c.remote.max_retries);
  long timeout_s = static_cast<long>(c.remote.request_timeout.count());
  read(tree, "policy.timeout_s", timeout_s);
  c.remote.request_timeout = std::chrono::seconds(timeout_s);
  if (auto mode = tree.get_optional<std::string>("policy.mode")) {
    if (*mode == "chat") c.remote.mode = policy::ApiMode::Chat;
    else if (*mode == "completion") c.remote.mode = policy::ApiMode::Completion;
    else throw ConfigError("policy.mode must be chat or completion");
  }

  read_path(tree, "paths.output", base, c.output_dir);
  read_path(tree, "paths.prompts", base, c.prompt_dir);
  if (!tree.get_optional<std::string>("paths.output")) c.output_dir = base / c.output_dir;
  return c;
}

}  // namespace azr::orchestrator
