#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "azr/policy/chat_client.hpp"
#include "azr/policy/scripted_policy.hpp"
#include "support.hpp"

using namespace azr;
using namespace azr::policy;

namespace {

GenerationRequest tagged(const std::string& prompt, Role role, TaskType type) {
  return {prompt, {}, PromptTag{role, type}};
}

// Local completion server; `handler` decides each response.
class FakeServer {
 public:
  explicit FakeServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post(R"(/v1/(chat/)?completions)", [handler](const httplib::Request& req, httplib::Response& res) {
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ChatClientConfig fast_config(const std::string& base_url) {
  ChatClientConfig c;
  c.base_url = base_url;
  c.model = "test-model";
  c.max_retries = 2;
  c.initial_backoff = std::chrono::milliseconds(1);
  c.max_backoff = std::chrono::milliseconds(5);
  c.request_timeout = std::chrono::seconds(5);
  return c;
}

std::string completion(const std::string& content, const std::string& finish = "stop") {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}},
                                      {"finish_reason", finish}}}},
                        {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}}
      .dump();
}

}  // namespace

TEST_SUITE("policy") {
  TEST_CASE("scripted rule returns its response verbatim") {
    ScriptedPolicy p(nlohmann::json{{"rules", {{{"exact", "hi"}, {"responses", {"  raw <answer>x</answer> "}}}}}});
    CHECK(p.generate({"hi", {}, {}}).response == "  raw <answer>x</answer> ");
    CHECK(p.generate({"hi", {}, {}}).response == "  raw <answer>x</answer> ");
  }

  TEST_CASE("sequence repeats its last entry once exhausted") {
    ScriptedPolicy p(nlohmann::json{{"rules", {{{"tag", "solve/deduction"}, {"responses", {"a", "b", "c"}}}}}});
    auto req = tagged("anything", Role::Solve, TaskType::Deduction);
    CHECK(p.generate(req).response == "a");
    CHECK(p.generate(req).response == "b");
    CHECK(p.generate(req).response == "c");
    CHECK(p.generate(req).response == "c");
  }

  TEST_CASE("first matching rule wins; contains matching") {
    ScriptedPolicy p(nlohmann::json{{"rules",
                                     {{{"contains", "needle"}, {"responses", {"found"}}},
                                      {{"tag", "propose/abduction"}, {"responses", {"tagged"}}}}}});
    CHECK(p.generate(tagged("hay needle hay", Role::Propose, TaskType::Abduction)).response == "found");
    CHECK(p.generate(tagged("hay", Role::Propose, TaskType::Abduction)).response == "tagged");
  }

  TEST_CASE("unmatched prompts error or fall back") {
    ScriptedPolicy strict(nlohmann::json{{"rules", nlohmann::json::array()}});
    CHECK_THROWS_AS(strict.generate({"x", {}, {}}), UnmatchedPromptError);
    ScriptedPolicy lenient(nlohmann::json{{"unmatched", "fallback"}, {"fallback", "fb"}, {"rules", nlohmann::json::array()}});
    CHECK(lenient.generate({"x", {}, {}}).response == "fb");
    CHECK_THROWS_AS(ScriptedPolicy(nlohmann::json{{"rules", {{{"responses", {"a"}}}}}}), Error);
  }

  TEST_CASE("checkpoint and restore resume a sequence") {
    nlohmann::json script{{"rules", {{{"tag", "solve/induction"}, {"responses", {"1", "2", "3"}}}}}};
    ScriptedPolicy p(script);
    auto req = tagged("p", Role::Solve, TaskType::Induction);
    p.generate(req);
    auto state = p.checkpoint();
    ScriptedPolicy q(script);
    q.restore(state);
    CHECK(q.generate(req).response == "2");
  }

  TEST_CASE("record and replay yield the same transcript sequence") {
    auto inner = std::make_shared<ScriptedPolicy>(
        nlohmann::json{{"rules", {{{"contains", "", }, {"responses", {"r1", "r2", "r3"}}}}}});
    RecordingPolicy rec(inner);
    for (int i = 0; i < 3; ++i) rec.generate({"p" + std::to_string(i), {}, {}});
    ReplayPolicy replay(rec.transcripts());
    for (int i = 0; i < 3; ++i) CHECK(replay.generate({"other", {}, {}}).response == rec.transcripts()[i].response);
    CHECK_THROWS_AS(replay.generate({"x", {}, {}}), TransportError);
  }

  TEST_CASE("base url splitting") {
    CHECK(split_base_url("http://h:8000/v1") == std::pair<std::string, std::string>{"http://h:8000", "/v1"});
    CHECK(split_base_url("https://h/") == std::pair<std::string, std::string>{"https://h", ""});
    CHECK(split_base_url("http://h") == std::pair<std::string, std::string>{"http://h", ""});
  }

  TEST_CASE("request body carries model, sampling params and one user message") {
    ChatCompletionsClient client(fast_config("http://127.0.0.1:1/v1"));
    auto body = client.request_body({"prompt text", {0.7, 0.9, 128}, {}});
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.7);
    CHECK(body["top_p"] == 0.9);
    CHECK(body["max_tokens"] == 128);
    CHECK(body["messages"].size() == 1);
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == "prompt text");
  }

  TEST_CASE("chat client parses completions, usage, truncation and auth") {
    std::string seen_auth;
    FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
      seen_auth = req.get_header_value("Authorization");
      res.set_content(completion("<answer>1</answer>", "length"), "application/json");
    });
    ::setenv("AZR_TEST_KEY", "secret", 1);
    auto config = fast_config(server.base_url());
    config.api_key_env = "AZR_TEST_KEY";
    ChatCompletionsClient client(config);
    auto t = client.generate({"p", {}, {}});
    CHECK(t.response == "<answer>1</answer>");
    CHECK(t.truncated);
    REQUIRE(t.usage);
    CHECK(t.usage->completion_tokens == 7);
    CHECK(seen_auth == "Bearer secret");
  }

  TEST_CASE("chat client retries transient failures") {
    std::atomic<int> calls{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
      if (++calls < 3) {
        res.status = 503;
        return;
      }
      res.set_content(completion("ok"), "application/json");
    });
    ChatCompletionsClient client(fast_config(server.base_url()));
    CHECK(client.generate({"p", {}, {}}).response == "ok");
    CHECK(calls == 3);
  }

  TEST_CASE("chat client gives up after the retry budget and on client errors") {
    std::atomic<int> calls{0};
    FakeServer failing([&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 500;
    });
    ChatCompletionsClient client(fast_config(failing.base_url()));
    CHECK_THROWS_AS(client.generate({"p", {}, {}}), TransportError);
    CHECK(calls == 3);

    std::atomic<int> bad_calls{0};
    FakeServer rejecting([&](const httplib::Request&, httplib::Response& res) {
      ++bad_calls;
      res.status = 400;
    });
    ChatCompletionsClient strict(fast_config(rejecting.base_url()));
    CHECK_THROWS_AS(strict.generate({"p", {}, {}}), TransportError);
    CHECK(bad_calls == 1);
  }

  TEST_CASE("unreachable endpoint is a transport error") {
    auto config = fast_config("http://127.0.0.1:1/v1");
    config.max_retries = 1;
    ChatCompletionsClient client(config);
    CHECK_THROWS_AS(client.generate({"p", {}, {}}), TransportError);
  }

  TEST_CASE("completion mode uses the text field") {
    FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body);
      CHECK(body.contains("prompt"));
      CHECK(req.path == "/v1/completions");
      res.set_content(nlohmann::json{{"choices", {{{"text", "raw"}, {"finish_reason", "stop"}}}}}.dump(),
                      "application/json");
    });
    auto config = fast_config(server.base_url());
    config.mode = ApiMode::Completion;
    ChatCompletionsClient client(config);
    auto t = client.generate({"p", {}, {}});
    CHECK(t.response == "raw");
    CHECK_FALSE(t.usage);
  }
}
