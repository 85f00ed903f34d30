#include "azr/policy/chat_client.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>

namespace azr::policy {

namespace {

using Clock = std::chrono::steady_clock;

bool retriable_status(int status) { return status == 408 || status == 429 || status >= 500; }

std::chrono::milliseconds backoff_delay(const ChatClientConfig& config, int attempt) {
  thread_local std::mt19937 jitter_rng{std::random_device{}()};
  auto base = config.initial_backoff * (std::int64_t{1} << std::min(attempt, 20));
  auto capped = std::min<std::chrono::milliseconds>(base, config.max_backoff);
  std::uniform_int_distribution<std::int64_t> jitter(capped.count() / 2, std::max<std::int64_t>(capped.count(), 1));
  return std::chrono::milliseconds(jitter(jitter_rng));
}

std::optional<std::chrono::milliseconds> retry_after(const httplib::Result& result) {
  if (!result || !result->has_header("Retry-After")) return std::nullopt;
  char* end = nullptr;
  std::string value = result->get_header_value("Retry-After");
  double seconds = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || seconds < 0) return std::nullopt;
  return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0));
}

}  // namespace

std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  std::size_t scheme = base_url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t slash = base_url.find('/', host_start);
  if (slash == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, slash), prefix};
}

ChatCompletionsClient::ChatCompletionsClient(ChatClientConfig config)
    : config_(std::move(config)),
      in_flight_(std::make_unique<std::counting_semaphore<>>(
          static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, config_.max_in_flight)))) {
  std::tie(origin_, path_prefix_) = split_base_url(config_.base_url);
}

nlohmann::json ChatCompletionsClient::request_body(const GenerationRequest& request) const {
  nlohmann::json body{{"model", config_.model},
                      {"temperature", request.params.temperature},
                      {"top_p", request.params.top_p},
                      {"max_tokens", request.params.max_response_tokens}};
  if (config_.mode == ApiMode::Chat) {
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
  } else {
    body["prompt"] = request.prompt;
  }
  return body;
}

PolicyTranscript ChatCompletionsClient::generate(const GenerationRequest& request) {
  const std::string path =
      path_prefix_ + (config_.mode == ApiMode::Chat ? "/chat/completions" : "/completions");
  const std::string payload = request_body(request).dump();
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<>* sem;
    ~Release() { sem->release(); }
  } release{in_flight_.get()};

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(backoff_delay(config_, attempt - 1));

    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(config_.request_timeout);
    client.set_write_timeout(std::chrono::seconds(60));

    const auto start = Clock::now();
    auto result = client.Post(path, headers, payload, "application/json");
    const auto latency = Clock::now() - start;

    if (!result) {
      last_error = fmt::format("connection to {} failed: {}", origin_, httplib::to_string(result.error()));
      spdlog::warn("policy request attempt {} failed: {}", attempt + 1, last_error);
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_error = fmt::format("HTTP {} from {}{}", result->status, origin_, path);
      if (!retriable_status(result->status)) throw TransportError(last_error + ": " + result->body);
      spdlog::warn("policy request attempt {} failed: {}", attempt + 1, last_error);
      if (auto wait = retry_after(result); wait && attempt < config_.max_retries) {
        std::this_thread::sleep_for(std::min<std::chrono::milliseconds>(*wait, config_.max_backoff));
      }
      continue;
    }

    nlohmann::json body;
    try {
      body = nlohmann::json::parse(result->body);
      const auto& choice = body.at("choices").at(0);
      PolicyTranscript transcript;
      transcript.prompt = request.prompt;
      transcript.latency = latency;
      transcript.response = config_.mode == ApiMode::Chat
                                ? choice.at("message").at("content").get<std::string>()
                                : choice.at("text").get<std::string>();
      transcript.truncated = choice.value("finish_reason", std::string()) == "length";
      if (body.contains("usage") && body["usage"].is_object()) {
        transcript.usage = TokenUsage{body["usage"].value("prompt_tokens", 0),
                                      body["usage"].value("completion_tokens", 0)};
      }
      return transcript;
    } catch (const nlohmann::json::exception& e) {
      last_error = fmt::format("malformed completion body: {}", e.what());
      spdlog::warn("policy request attempt {} failed: {}", attempt + 1, last_error);
    }
  }
  throw TransportError(
      fmt::format("giving up after {} attempts: {}", config_.max_retries + 1, last_error));
}

}  // namespace azr::policy
