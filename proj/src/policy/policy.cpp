#include "azr/policy/policy.hpp"

#include <fmt/format.h>

namespace azr::policy {

std::string tag_string(const PromptTag& tag) {
  return fmt::format("{}/{}", to_string(tag.role), to_string(tag.task_type));
}

PolicyTranscript RecordingPolicy::generate(const GenerationRequest& request) {
  auto transcript = inner_->generate(request);
  std::lock_guard lock(mutex_);
  transcripts_.push_back(transcript);
  return transcript;
}

std::vector<PolicyTranscript> RecordingPolicy::transcripts() const {
  std::lock_guard lock(mutex_);
  return transcripts_;
}

PolicyTranscript ReplayPolicy::generate(const GenerationRequest& request) {
  std::lock_guard lock(mutex_);
  if (next_ >= transcripts_.size()) {
    throw TransportError(fmt::format("replay exhausted after {} transcripts", transcripts_.size()));
  }
  PolicyTranscript transcript = transcripts_[next_++];
  transcript.prompt = request.prompt;
  return transcript;
}

nlohmann::json ReplayPolicy::checkpoint() const {
  std::lock_guard lock(mutex_);
  return nlohmann::json{{"next", next_}};
}

void ReplayPolicy::restore(const nlohmann::json& state) {
  std::lock_guard lock(mutex_);
  if (state.is_object()) next_ = state.value("next", std::size_t{0});
}

}  // namespace azr::policy
