#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "azr/core/buffer.hpp"
#include "azr/core/types.hpp"

namespace azr {

using json = nlohmann::json;

/// Buffer line: {task_type, program, input, output} for triplets or
/// {task_type, program, pairs: [[input, output], ...], message} for induction.
json task_to_json(TaskType type, const TaskRecord& record);
/// Returns the record and the task type named in the line.
std::pair<TaskType, TaskRecord> task_from_json(const json& line);

json rollout_to_json(const RolloutRecord& record);
RolloutRecord rollout_from_json(const json& line);

/// Serialises one buffer to a JSONL file, replacing its contents.
void save_buffer(const std::filesystem::path& path, const TaskBuffer& buffer);
/// Appends records to a buffer file.
void append_tasks(const std::filesystem::path& path, TaskType type,
                  const std::vector<TaskRecord>& records);
/// Reads a buffer file. Lines whose task_type differs from `type` are an error.
TaskBuffer load_buffer(const std::filesystem::path& path, TaskType type,
                       std::size_t capacity = kDefaultBufferCapacity);

/// Reads every non-empty line of a JSONL file.
std::vector<json> read_jsonl(const std::filesystem::path& path);
/// Appends lines and flushes; throws azr::Error on any write failure.
void append_jsonl(const std::filesystem::path& path, const std::vector<json>& lines);

}  // namespace azr
