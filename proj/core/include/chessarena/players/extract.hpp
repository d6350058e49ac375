#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "chessarena/chess/board.hpp"
#include "chessarena/players/prompts.hpp"
#include "chessarena/players/spec.hpp"

namespace chessarena::players {

enum class AttemptOutcome { ok, parsing_error, illegal_move, forbidden_thinking, transport_error };

std::string_view to_string(AttemptOutcome o);
AttemptOutcome attempt_outcome_from_string(std::string_view s);

struct MoveAttempt {
  int index{1};
  std::string raw;
  std::optional<std::string> reasoning;
  AttemptOutcome outcome{AttemptOutcome::parsing_error};
  std::optional<chess::MoveToken> move;
  std::string candidate;  // text the move was read from, if any
  std::string detail;
  int prompt_tokens{0};
  int completion_tokens{0};
};

nlohmann::ordered_json attempt_to_json(const MoveAttempt& a);
MoveAttempt attempt_from_json(const nlohmann::json& j);

/// Text the move is read from, chosen in order: the last fenced block inside
/// the last <answer> element (or the element's text), the last fenced block,
/// the last UCI-shaped token, the last SAN-shaped token. Empty if none.
std::string extract_candidate(std::string_view raw);

/// Trimmed content of the last fenced block inside the last <answer>
/// element, if there is one.
std::optional<std::string> answer_block(std::string_view raw);

/// Classifies a response. Never throws. Bullet responses must consist of a
/// single move token once fences and <answer> tags are removed, and must
/// come with no reasoning text; other modes ignore `reasoning`.
MoveAttempt extract_move(std::string_view raw, PlayMode mode, const chess::Board& board,
                         std::string_view reasoning = {});

FailureKind failure_kind(AttemptOutcome o);

}  // namespace chessarena::players
