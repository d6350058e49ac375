#pragma once

#include <span>
#include <string>
#include <string_view>

#include "chessarena/chess/board.hpp"

namespace chessarena::chess {

/// Interprets free-form move text. UCI is tried first (case-insensitive,
/// surrounding punctuation and backticks trimmed), then SAN resolved against
/// `board`. A UCI result is only well-formed, not necessarily legal.
/// Throws MoveParseError.
MoveToken parse_move(std::string_view text, const Board& board);

/// Strict UCI coordinate syntax; no board needed.
std::optional<Move> parse_uci(std::string_view text);

/// SAN against the legal moves of `board`. Throws MoveParseError.
Move parse_san(std::string_view text, const Board& board);

/// Minimal unambiguous SAN with +/# suffix. Throws IllegalMoveError.
std::string move_to_san(const Board& board, const Move& mv);

/// "1. e4 e5 2. Nf3" style move text starting from `start`.
std::string moves_to_pgn(const Board& start, std::span<const Move> moves);

}  // namespace chessarena::chess
