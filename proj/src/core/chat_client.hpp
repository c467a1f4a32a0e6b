#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/session.hpp"

namespace evolif {

struct EndpointConfig {
  std::string base_url;  // e.g. "http://localhost:8088"
  std::string model;
  std::string path = "/v1/chat/completions";
  std::string token_env;  // name of the env var holding the bearer token
  int timeout_ms = 30000;
  int max_retries = 3;
  int backoff_initial_ms = 250;  // doubled on each retry
};

// One round trip against an OpenAI-style chat endpoint. Throws
// TransportFailure when the request cannot be completed after retries and
// MalformedResponse when the reply does not carry a completion.
std::string chat_completion(const EndpointConfig& endpoint, const std::vector<Message>& messages);

class HttpChatAdapter : public ModelAdapter {
 public:
  explicit HttpChatAdapter(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {}
  std::string identity() const override { return endpoint_.model; }
  std::string respond(const std::vector<Message>& history) override {
    return chat_completion(endpoint_, history);
  }

 private:
  EndpointConfig endpoint_;
};

class HttpParaphraseAdapter : public ParaphraseAdapter {
 public:
  explicit HttpParaphraseAdapter(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {}
  std::string id() const override { return endpoint_.model; }
  std::string rewrite(const std::string& raw_prompt) override {
    return chat_completion(endpoint_, {{"user", raw_prompt}});
  }

 private:
  EndpointConfig endpoint_;
};

}  // namespace evolif
