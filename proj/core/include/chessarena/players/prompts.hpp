#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/chess/board.hpp"
#include "chessarena/players/spec.hpp"

namespace chessarena::players {

struct ChatMessage {
  enum class Role { system, user, assistant };
  Role role{Role::user};
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

std::string_view to_string(ChatMessage::Role r);
ChatMessage::Role role_from_string(std::string_view s);
nlohmann::ordered_json messages_to_json(std::span<const ChatMessage> msgs);
std::vector<ChatMessage> messages_from_json(const nlohmann::json& j);

/// Position a player is asked about: the board to move in plus the moves
/// that led to it from `start`.
struct PromptContext {
  chess::Board start{chess::Board::start()};
  std::vector<chess::Move> moves;
  chess::Board board{chess::Board::start()};
};

std::string system_prompt(PlayMode mode, chess::Color color);

/// "Legal moves in UCI notation: a2a3 a2a4 ... h2h4."
std::string legal_moves_line(const chess::Board& board);

/// Empty when there is no history to show or the format is none.
std::string history_line(const PlayerSpec& spec, const PromptContext& ctx);

/// System plus one user message (bullet, blitz, standard). Blindfold players
/// get build_blindfold_conversation instead.
std::vector<ChatMessage> build_prompt(const PlayerSpec& spec, const PromptContext& ctx);

/// Multi-turn transcript in which the player's own earlier moves are
/// assistant turns and each opponent move is a user turn.
std::vector<ChatMessage> build_blindfold_conversation(const PlayerSpec& spec, const PromptContext& ctx);

/// Dispatches on spec.mode.
std::vector<ChatMessage> build_messages(const PlayerSpec& spec, const PromptContext& ctx);

enum class FailureKind { parsing_error, illegal_move, forbidden_thinking };

/// Fixed instruction appended after a failed attempt.
std::string corrective_message(FailureKind kind);

}  // namespace chessarena::players
