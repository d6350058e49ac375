#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chessarena/players/prompts.hpp"

namespace chessarena::players {

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature{0.2};
  double top_p{1.0};
  int max_tokens{4096};
};

struct ChatResponse {
  std::string content;
  std::optional<std::string> reasoning;
  int prompt_tokens{0};
  int completion_tokens{0};
};

/// Network or protocol failure talking to a model endpoint. Fatal errors
/// (bad credentials, unknown model or route) are not worth retrying.
class transport_error : public std::runtime_error {
 public:
  transport_error(const std::string& what, bool fatal, int status = 0)
      : std::runtime_error(what), fatal_(fatal), status_(status) {}
  bool fatal() const noexcept { return fatal_; }
  int status() const noexcept { return status_; }

 private:
  bool fatal_;
  int status_;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Throws transport_error.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// OpenAI-style chat completions over HTTP(S). `url` is the full endpoint,
/// e.g. https://api.openai.com/v1/chat/completions.
std::unique_ptr<ChatClient> make_http_chat_client(const std::string& url, std::string api_key,
                                                  std::chrono::milliseconds timeout);

/// Request body in the chat completions schema.
std::string chat_request_body(const ChatRequest& request);

/// Parses a chat completions response body; throws transport_error when the
/// body has no first choice with message content.
ChatResponse parse_chat_response(const std::string& body);

}  // namespace chessarena::players
