#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chessarena/chess/types.hpp"

namespace chessarena::chess {

struct CastlingRights {
  bool white_king{false};
  bool white_queen{false};
  bool black_king{false};
  bool black_queen{false};

  friend constexpr bool operator==(const CastlingRights&, const CastlingRights&) = default;
};

inline constexpr std::string_view kStartFen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

/// Full position value. Construct through parse_fen() or start(); every
/// public operation returns a new Board and leaves the receiver untouched.
class Board {
 public:
  static Board start();
  static Board parse_fen(std::string_view fen);

  std::string fen() const;

  std::optional<Piece> at(Square sq) const noexcept { return squares_[sq.index()]; }
  Color side_to_move() const noexcept { return side_; }
  const CastlingRights& castling() const noexcept { return castling_; }
  std::optional<Square> en_passant() const noexcept { return en_passant_; }
  int halfmove_clock() const noexcept { return halfmove_; }
  int fullmove_number() const noexcept { return fullmove_; }

  /// Legal moves sorted by UCI string.
  std::vector<Move> legal_moves() const;
  bool is_legal(const Move& mv) const;

  /// Throws IllegalMoveError when mv is not legal here.
  Board apply(const Move& mv) const;

  bool in_check() const;
  bool is_square_attacked(Square sq, Color by) const;
  std::optional<Square> king_square(Color c) const;

  /// True when a pawn of the side to move can legally capture en passant.
  bool has_legal_en_passant() const;

  /// Placement, side, castling and en passant availability; positions with
  /// equal keys are repetitions of each other.
  std::string repetition_key() const;

  friend bool operator==(const Board&, const Board&) = default;
  friend std::uint64_t perft(const Board& board, int depth);

 private:
  Board() = default;

  void pseudo_legal_moves(std::vector<Move>& out) const;
  void legal_unsorted(std::vector<Move>& out) const;
  static std::uint64_t perft_nodes(const Board& board, int depth);
  Board apply_unchecked(const Move& mv) const;
  void validate() const;

  std::array<std::optional<Piece>, 64> squares_{};
  Color side_{Color::white};
  CastlingRights castling_{};
  std::optional<Square> en_passant_;
  int halfmove_{0};
  int fullmove_{1};
};

struct SquareMoves {
  std::optional<Piece> piece;
  std::vector<Move> moves;
};

/// Piece on sq and its legal moves; moves are empty for an empty square or
/// for a piece that does not belong to the side to move.
SquareMoves legal_moves_for_square(const Board& board, Square sq);

/// Leaf count of the legal move tree at exactly `depth` plies.
std::uint64_t perft(const Board& board, int depth);

}  // namespace chessarena::chess
