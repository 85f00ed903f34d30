#include "azr/proposer/prompt_library.hpp"

#include <fmt/format.h>

namespace azr::proposer {

const std::set<std::string, std::less<>>& prompt_slots() {
  static const std::set<std::string, std::less<>> slots = {
      "prompt", "references", "forbidden_modules", "program", "num_inputs",
      "input",  "output",     "message",           "pairs"};
  return slots;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

PromptLibrary::PromptLibrary(const std::filesystem::path& directory) {
  wrapper_ = sandbox::read_text_file(directory / "r1_template.txt");
  for (Role role : kAllRoles) {
    for (TaskType type : kAllTaskTypes) {
      auto file = directory / fmt::format("{}_{}.txt", to_string(role), to_string(type));
      bodies_[{role, type}] = sandbox::read_text_file(file);
    }
  }
}

const std::string& PromptLibrary::body(Role role, TaskType type) const {
  return bodies_.at({role, type});
}

std::string PromptLibrary::render(Role role, TaskType type, const sandbox::Bindings& bindings) const {
  std::string inner = sandbox::render_slots(body(role, type), bindings, prompt_slots());
  // Trailing newline of the body file is not part of the user turn.
  while (!inner.empty() && inner.back() == '\n') inner.pop_back();
  return sandbox::render_slots(wrapper_, {{"prompt", inner}}, {"prompt"});
}

}  // namespace azr::proposer
