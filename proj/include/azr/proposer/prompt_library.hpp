#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "azr/core/types.hpp"
#include "azr/sandbox/driver_template.hpp"

namespace azr::proposer {

/// Prompt text files, one per (role, task type), plus the think/answer
/// wrapper every prompt is embedded in:
///
///   r1_template.txt                       {prompt}
///   propose_{abduction,deduction}.txt     {references} {forbidden_modules}
///   propose_induction.txt                 {program} {num_inputs} {forbidden_modules}
///   solve_deduction.txt                   {program} {input}
///   solve_abduction.txt                   {program} {output}
///   solve_induction.txt                   {message} {pairs} {forbidden_modules}
class PromptLibrary {
 public:
  explicit PromptLibrary(const std::filesystem::path& directory = AZR_DEFAULT_PROMPT_DIR);

  /// Renders the (role, type) body with `bindings` and wraps it.
  std::string render(Role role, TaskType type, const sandbox::Bindings& bindings) const;

  const std::string& body(Role role, TaskType type) const;

 private:
  std::string wrapper_;
  std::map<std::pair<Role, TaskType>, std::string> bodies_;
};

/// Slot names recognised in prompt files.
const std::set<std::string, std::less<>>& prompt_slots();

/// Character-based token estimate used when the server reports no usage.
std::size_t estimate_tokens(std::string_view text);

}  // namespace azr::proposer
