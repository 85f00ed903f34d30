#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "azr/policy/policy.hpp"

namespace azr::policy {

enum class ApiMode { Chat, Completion };

struct ChatClientConfig {
  std::string base_url = "http://127.0.0.1:8000/v1";  // scheme://host[:port][/prefix]
  std::string model;
  std::string api_key_env = "AZR_API_KEY";
  ApiMode mode = ApiMode::Chat;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8'000};
  std::chrono::seconds request_timeout{600};
  std::size_t max_in_flight = 8;
};

/// Client for OpenAI-compatible `/chat/completions` and `/completions`
/// endpoints. Connection failures, 408, 429 and 5xx responses are retried
/// with exponential backoff (honouring Retry-After); other statuses fail
/// immediately. A completion that parses is returned as is.
class ChatCompletionsClient : public Policy {
 public:
  explicit ChatCompletionsClient(ChatClientConfig config);

  PolicyTranscript generate(const GenerationRequest& request) override;
  std::size_t max_in_flight() const override { return config_.max_in_flight; }

  /// Request body sent for one generation. Exposed for tests.
  nlohmann::json request_body(const GenerationRequest& request) const;

 private:
  ChatClientConfig config_;
  std::string origin_;
  std::string path_prefix_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

/// Splits "http://host:port/v1" into ("http://host:port", "/v1").
std::pair<std::string, std::string> split_base_url(const std::string& base_url);

}  // namespace azr::policy
