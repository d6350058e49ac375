#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chessarena/engine/uci.hpp"
#include "chessarena/players/chat_client.hpp"
#include "chessarena/players/extract.hpp"
#include "chessarena/players/prompts.hpp"
#include "chessarena/players/spec.hpp"
#include "chessarena/util/rng.hpp"

namespace chessarena::players {

/// Infrastructure failure that ends a game without a result.
class game_aborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MoveDecision {
  std::optional<chess::Move> move;  // empty means the player forfeits
  std::vector<MoveAttempt> attempts;
  std::string prompt_digest;

  bool forfeit() const noexcept { return !move.has_value(); }
};

class Player {
 public:
  explicit Player(PlayerSpec spec) : spec_(std::move(spec)) {}
  virtual ~Player() = default;

  const PlayerSpec& spec() const noexcept { return spec_; }

  /// Throws game_aborted on infrastructure failure.
  virtual MoveDecision request_move(const PromptContext& ctx) = 0;

 private:
  PlayerSpec spec_;
};

/// Uniform draw over the legal moves of `board`, which must have one.
chess::Move random_player_move(const chess::Board& board, util::Rng& rng);

struct RetryPolicy {
  int max_attempts{5};
  std::chrono::milliseconds backoff{1000};
};

class LlmPlayer final : public Player {
 public:
  LlmPlayer(PlayerSpec spec, std::shared_ptr<ChatClient> client, RetryPolicy retry = {});
  MoveDecision request_move(const PromptContext& ctx) override;

 private:
  std::optional<ChatResponse> call_with_retry(const ChatRequest& req, int attempt, std::string& error);

  std::shared_ptr<ChatClient> client_;
  RetryPolicy retry_;
};

class EnginePlayer final : public Player {
 public:
  EnginePlayer(PlayerSpec spec, engine::UciEngine engine);
  MoveDecision request_move(const PromptContext& ctx) override;

 private:
  engine::UciEngine engine_;
};

class RandomPlayer final : public Player {
 public:
  RandomPlayer(PlayerSpec spec, std::uint64_t seed) : Player(std::move(spec)), rng_(seed) {}
  MoveDecision request_move(const PromptContext& ctx) override;

 private:
  util::Rng rng_;
};

struct PlayerFactory {
  /// Builds the chat client for an llm_api player; defaults to HTTP with the
  /// key read from the spec's api_key_env variable.
  std::function<std::shared_ptr<ChatClient>(const PlayerSpec&)> chat;
  RetryPolicy retry;
  /// Used by engine players whose spec has no command of its own.
  std::string default_engine_command;
  engine::EngineOptions engine_options;
};

/// HTTP client for an llm_api spec, keyed from its api_key_env variable.
/// Throws util::config_error when the variable is unset.
std::shared_ptr<ChatClient> default_chat_client(const PlayerSpec& spec);

/// Fresh player instance for one game. Throws util::config_error for a
/// missing API key variable and engine::engine_error if an engine cannot start.
std::unique_ptr<Player> make_player(const PlayerSpec& spec, std::uint64_t seed, const PlayerFactory& factory);

}  // namespace chessarena::players
