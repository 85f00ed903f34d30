#include "azr/core/jsonl.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

namespace azr {

json task_to_json(TaskType type, const TaskRecord& record) {
  json line;
  line["task_type"] = std::string(to_string(type));
  if (const auto* triplet = std::get_if<Triplet>(&record)) {
    line["program"] = triplet->program;
    line["input"] = triplet->input;
    line["output"] = triplet->output;
  } else {
    const auto& task = std::get<InductionTask>(record);
    line["program"] = task.program;
    json pairs = json::array();
    for (const auto& pair : task.pairs) pairs.push_back(json::array({pair.input, pair.output}));
    line["pairs"] = std::move(pairs);
    line["message"] = task.message;
  }
  return line;
}

std::pair<TaskType, TaskRecord> task_from_json(const json& line) {
  try {
    TaskType type = task_type_from_string(line.at("task_type").get<std::string>());
    if (type == TaskType::Induction) {
      InductionTask task;
      task.program = line.at("program").get<std::string>();
      for (const auto& pair : line.at("pairs")) {
        if (!pair.is_array() || pair.size() != 2) throw Error("induction pair must have two entries");
        task.pairs.push_back({pair[0].get<std::string>(), pair[1].get<std::string>()});
      }
      task.message = line.at("message").get<std::string>();
      return {type, std::move(task)};
    }
    return {type, Triplet{line.at("program").get<std::string>(), line.at("input").get<std::string>(),
                          line.at("output").get<std::string>()}};
  } catch (const json::exception& e) {
    throw Error(fmt::format("malformed task line: {}", e.what()));
  }
}

json rollout_to_json(const RolloutRecord& record) {
  if (!std::isfinite(record.reward) || !std::isfinite(record.advantage)) {
    throw Error("rollout record carries a non-finite reward or advantage");
  }
  return json{{"iteration", record.iteration},
              {"role", std::string(to_string(record.role))},
              {"task_type", std::string(to_string(record.task_type))},
              {"prompt", record.prompt},
              {"response", record.response},
              {"parse_status", std::string(to_string(record.parse_status))},
              {"reward", record.reward},
              {"advantage", record.advantage}};
}

RolloutRecord rollout_from_json(const json& line) {
  try {
    RolloutRecord record;
    record.iteration = line.at("iteration").get<std::int64_t>();
    record.role = role_from_string(line.at("role").get<std::string>());
    record.task_type = task_type_from_string(line.at("task_type").get<std::string>());
    record.prompt = line.at("prompt").get<std::string>();
    record.response = line.at("response").get<std::string>();
    record.parse_status = parse_status_from_string(line.at("parse_status").get<std::string>());
    record.reward = line.at("reward").get<double>();
    record.advantage = line.at("advantage").get<double>();
    return record;
  } catch (const json::exception& e) {
    throw Error(fmt::format("malformed experience line: {}", e.what()));
  }
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  std::vector<json> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (text.empty()) continue;
    try {
      lines.push_back(json::parse(text));
    } catch (const json::parse_error& e) {
      throw Error(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
  }
  return lines;
}

namespace {

void write_lines(const std::filesystem::path& path, const std::vector<json>& lines,
                 std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::binary);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  for (const auto& line : lines) out << line.dump() << '\n';
  out.flush();
  if (!out) throw Error(fmt::format("write to {} failed", path.string()));
}

}  // namespace

void append_jsonl(const std::filesystem::path& path, const std::vector<json>& lines) {
  write_lines(path, lines, std::ios::app);
}

void save_buffer(const std::filesystem::path& path, const TaskBuffer& buffer) {
  std::vector<json> lines;
  for (const auto& record : buffer.items()) lines.push_back(task_to_json(buffer.task_type(), record));
  write_lines(path, lines, std::ios::trunc);
}

void append_tasks(const std::filesystem::path& path, TaskType type,
                  const std::vector<TaskRecord>& records) {
  std::vector<json> lines;
  for (const auto& record : records) lines.push_back(task_to_json(type, record));
  append_jsonl(path, lines);
}

TaskBuffer load_buffer(const std::filesystem::path& path, TaskType type, std::size_t capacity) {
  TaskBuffer buffer(type, capacity);
  for (const auto& line : read_jsonl(path)) {
    auto [line_type, record] = task_from_json(line);
    if (line_type != type) {
      throw BufferTypeError(fmt::format("{} holds a {} task, expected {}", path.string(),
                                        to_string(line_type), to_string(type)));
    }
    buffer.insert(std::move(record));
  }
  return buffer;
}

}  // namespace azr
