#include "azr/proposer/response_parse.hpp"

#include <regex>

namespace azr::proposer {

namespace {

constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";
constexpr std::string_view kFence = "```";

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

ProposalParse failure(TaskType type, std::string error) {
  ProposalParse parse;
  parse.task_type = type;
  parse.error = std::move(error);
  return parse;
}

}  // namespace

std::string trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  std::size_t begin = text.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  std::size_t end = text.find_last_not_of(ws);
  return std::string(text.substr(begin, end - begin + 1));
}

bool defines_f(std::string_view program) {
  static const std::regex pattern(R"((^|\n)[ \t]*def[ \t]+f[ \t]*\()");
  return std::regex_search(program.begin(), program.end(), pattern);
}

std::optional<std::string> extract_answer(std::string_view response) {
  std::size_t think_end = response.find(kThinkClose);
  if (think_end == std::string_view::npos) return std::nullopt;
  std::string_view rest = response.substr(think_end + kThinkClose.size());
  if (count_occurrences(rest, kAnswerOpen) != 1 || count_occurrences(rest, kAnswerClose) != 1) {
    return std::nullopt;
  }
  std::size_t open = rest.find(kAnswerOpen);
  std::size_t close = rest.find(kAnswerClose);
  if (close < open) return std::nullopt;
  std::size_t begin = open + kAnswerOpen.size();
  return std::string(rest.substr(begin, close - begin));
}

std::vector<std::string> fenced_blocks(std::string_view text, std::string_view lang) {
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while ((pos = text.find(kFence, pos)) != std::string_view::npos) {
    std::size_t tag_begin = pos + kFence.size();
    std::size_t line_end = text.find('\n', tag_begin);
    if (line_end == std::string_view::npos) break;
    std::string tag = trim(text.substr(tag_begin, line_end - tag_begin));
    std::size_t close = text.find(kFence, line_end + 1);
    if (close == std::string_view::npos) break;
    if (tag == lang) {
      std::string_view body = text.substr(line_end + 1, close - line_end - 1);
      if (body.ends_with('\n')) body.remove_suffix(1);
      blocks.emplace_back(body);
    }
    pos = close + kFence.size();
  }
  return blocks;
}

std::string strip_code_fence(std::string_view text) {
  std::string body = trim(text);
  if (!body.starts_with(kFence)) return body;
  std::size_t line_end = body.find('\n');
  if (line_end == std::string::npos) return body;
  std::string_view inner = std::string_view(body).substr(line_end + 1);
  std::string trimmed = trim(inner);
  if (trimmed.ends_with(kFence)) trimmed.resize(trimmed.size() - kFence.size());
  return trim(trimmed);
}

ProposalParse parse_proposal(std::string_view response, TaskType type) {
  auto answer = extract_answer(response);
  if (!answer) return failure(type, "missing or repeated answer block");

  ProposalParse parse;
  parse.task_type = type;
  auto inputs = fenced_blocks(*answer, "input");

  if (type == TaskType::Induction) {
    auto messages = fenced_blocks(*answer, "message");
    if (inputs.size() < 2) return failure(type, "induction proposal needs at least two inputs");
    if (messages.size() != 1) return failure(type, "induction proposal needs exactly one message block");
    InductionProposal payload;
    for (const auto& block : inputs) {
      std::string input = trim(block);
      if (input.empty()) return failure(type, "empty input block");
      payload.inputs.push_back(std::move(input));
    }
    payload.message = trim(messages.front());
    parse.payload = std::move(payload);
  } else {
    auto programs = fenced_blocks(*answer, "python");
    if (programs.size() != 1) return failure(type, "expected exactly one python block");
    if (inputs.size() != 1) return failure(type, "expected exactly one input block");
    if (!defines_f(programs.front())) return failure(type, "program does not define f");
    std::string input = trim(inputs.front());
    if (input.empty()) return failure(type, "empty input block");
    parse.payload = CodeProposal{programs.front(), std::move(input)};
  }
  parse.status = ParseStatus::WellFormatted;
  return parse;
}

}  // namespace azr::proposer
