#include "azr/core/types.hpp"

#include <fmt/format.h>

namespace azr {

std::string_view to_string(TaskType type) {
  switch (type) {
    case TaskType::Abduction:
      return "abduction";
    case TaskType::Deduction:
      return "deduction";
    case TaskType::Induction:
      return "induction";
  }
  return "unknown";
}

std::string_view to_string(Role role) {
  return role == Role::Propose ? "propose" : "solve";
}

std::string_view to_string(ParseStatus status) {
  return status == ParseStatus::WellFormatted ? "well_formatted" : "format_error";
}

TaskType task_type_from_string(std::string_view name) {
  for (TaskType type : kAllTaskTypes) {
    if (to_string(type) == name) return type;
  }
  // Short forms used in config files and on the command line.
  if (name == "abd") return TaskType::Abduction;
  if (name == "ded") return TaskType::Deduction;
  if (name == "ind") return TaskType::Induction;
  throw Error(fmt::format("unknown task type '{}'", name));
}

Role role_from_string(std::string_view name) {
  for (Role role : kAllRoles) {
    if (to_string(role) == name) return role;
  }
  throw Error(fmt::format("unknown role '{}'", name));
}

ParseStatus parse_status_from_string(std::string_view name) {
  if (name == "well_formatted") return ParseStatus::WellFormatted;
  if (name == "format_error") return ParseStatus::FormatError;
  throw Error(fmt::format("unknown parse status '{}'", name));
}

const std::string& program_of(const TaskRecord& record) {
  return std::visit([](const auto& task) -> const std::string& { return task.program; }, record);
}

std::size_t group_index(GroupKey key) {
  return static_cast<std::size_t>(key.task_type) * 2 + static_cast<std::size_t>(key.role);
}

GroupKey group_from_index(std::size_t index) {
  return GroupKey{static_cast<TaskType>(index / 2), static_cast<Role>(index % 2)};
}

Triplet zero_triplet() {
  return Triplet{"def f(x):\n    return x\n", "'Hello World'", "'Hello World'"};
}

}  // namespace azr
