#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "chessarena/players/chat_client.hpp"

#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace chessarena::players {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex re("^(https?://[^/]+)(/.*)?$");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw transport_error("bad endpoint url: " + url, true);
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/v1/chat/completions")};
}

class HttpChatClient final : public ChatClient {
 public:
  HttpChatClient(const std::string& url, std::string api_key, std::chrono::milliseconds timeout)
      : endpoint_(split_url(url)), api_key_(std::move(api_key)), timeout_(timeout) {}

  ChatResponse complete(const ChatRequest& request) override {
    httplib::Client cli(endpoint_.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    cli.set_connection_timeout(10, 0);
    cli.set_read_timeout(secs.count(), 0);
    cli.set_write_timeout(30, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(endpoint_.path, headers, chat_request_body(request), "application/json");
    if (!res) throw transport_error("request to " + endpoint_.origin + " failed: " + httplib::to_string(res.error()), false);
    if (res->status == 401 || res->status == 403 || res->status == 404) {
      throw transport_error("endpoint rejected request with HTTP " + std::to_string(res->status), true, res->status);
    }
    if (res->status != 200) {
      throw transport_error("endpoint returned HTTP " + std::to_string(res->status), false, res->status);
    }
    return parse_chat_response(res->body);
  }

 private:
  Endpoint endpoint_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

}  // namespace

std::string chat_request_body(const ChatRequest& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["messages"] = messages_to_json(r.messages);
  j["temperature"] = r.temperature;
  j["top_p"] = r.top_p;
  j["max_tokens"] = r.max_tokens;
  return j.dump();
}

ChatResponse parse_chat_response(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw transport_error("endpoint returned a non-JSON body", false);
  }
  ChatResponse out;
  try {
    const auto& msg = j.at("choices").at(0).at("message");
    out.content = msg.at("content").is_null() ? std::string() : msg.at("content").get<std::string>();
    for (const char* key : {"reasoning_content", "reasoning"}) {
      if (msg.contains(key) && msg[key].is_string()) {
        out.reasoning = msg[key].get<std::string>();
        break;
      }
    }
    if (j.contains("usage") && j["usage"].is_object()) {
      out.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      out.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
  } catch (const nlohmann::json::exception&) {
    throw transport_error("endpoint response has no choices[0].message.content", false);
  }
  return out;
}

std::unique_ptr<ChatClient> make_http_chat_client(const std::string& url, std::string api_key,
                                                  std::chrono::milliseconds timeout) {
  return std::make_unique<HttpChatClient>(url, std::move(api_key), timeout);
}

}  // namespace chessarena::players
