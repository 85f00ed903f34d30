#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace azr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TaskType { Abduction, Deduction, Induction };
enum class Role { Propose, Solve };
enum class ParseStatus { WellFormatted, FormatError };

inline constexpr std::array<TaskType, 3> kAllTaskTypes = {TaskType::Abduction, TaskType::Deduction,
                                                          TaskType::Induction};
inline constexpr std::array<Role, 2> kAllRoles = {Role::Propose, Role::Solve};

std::string_view to_string(TaskType type);
std::string_view to_string(Role role);
std::string_view to_string(ParseStatus status);

/// Throws azr::Error on unknown names.
TaskType task_type_from_string(std::string_view name);
Role role_from_string(std::string_view name);
ParseStatus parse_status_from_string(std::string_view name);

/// A (program, input, output) task. `output` is the interpreter's repr of
/// `f(input)` and is only ever filled in from a sandbox run.
struct Triplet {
  std::string program;
  std::string input;
  std::string output;

  bool operator==(const Triplet&) const = default;
};

struct IoPair {
  std::string input;
  std::string output;

  bool operator==(const IoPair&) const = default;
};

/// Program with N >= 2 verified input/output pairs and a free-text message.
struct InductionTask {
  std::string program;
  std::vector<IoPair> pairs;
  std::string message;

  bool operator==(const InductionTask&) const = default;
};

using TaskRecord = std::variant<Triplet, InductionTask>;

/// Program text of either task shape.
const std::string& program_of(const TaskRecord& record);

/// Trainer-facing experience unit.
struct RolloutRecord {
  Role role = Role::Propose;
  TaskType task_type = TaskType::Deduction;
  std::string prompt;
  std::string response;
  ParseStatus parse_status = ParseStatus::FormatError;
  double reward = 0.0;
  double advantage = 0.0;
  std::int64_t iteration = 0;

  bool operator==(const RolloutRecord&) const = default;
};

/// Six (task type, role) groups, indexable 0..5.
struct GroupKey {
  TaskType task_type;
  Role role;

  bool operator==(const GroupKey&) const = default;
  auto operator<=>(const GroupKey&) const = default;
};

inline constexpr std::size_t kGroupCount = 6;
std::size_t group_index(GroupKey key);
GroupKey group_from_index(std::size_t index);

/// The identity-function seed triplet.
Triplet zero_triplet();

}  // namespace azr
