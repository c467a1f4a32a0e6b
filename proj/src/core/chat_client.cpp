#include "core/chat_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace evolif {

namespace {

struct ParsedUrl {
  std::string host_port;  // scheme://host:port, what httplib::Client wants
};

ParsedUrl parse_base(const std::string& base_url) {
  std::string trimmed = base_url;
  while (!trimmed.empty() && trimmed.back() == '/') trimmed.pop_back();
  if (trimmed.empty()) throw TransportFailure("empty base url");
  return {trimmed};
}

}  // namespace

std::string chat_completion(const EndpointConfig& endpoint, const std::vector<Message>& messages) {
  nlohmann::ordered_json body;
  body["model"] = endpoint.model;
  auto& msgs = body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  }
  std::string payload = body.dump();

  ParsedUrl url = parse_base(endpoint.base_url);
  httplib::Client client(url.host_port);
  client.set_connection_timeout(std::chrono::milliseconds(endpoint.timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(endpoint.timeout_ms));
  client.set_write_timeout(std::chrono::milliseconds(endpoint.timeout_ms));

  httplib::Headers headers;
  if (!endpoint.token_env.empty()) {
    const char* token = std::getenv(endpoint.token_env.c_str());
    if (token && *token) headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::string last_error;
  int backoff = endpoint.backoff_initial_ms;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    auto res = client.Post(endpoint.path, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportFailure("http status " + std::to_string(res->status));
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw MalformedResponse("reply is not valid json");
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw MalformedResponse(e.what());
    }
  }
  throw TransportFailure(last_error.empty() ? "request failed" : last_error);
}

}  // namespace evolif
