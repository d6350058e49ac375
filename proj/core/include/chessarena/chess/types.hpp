#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chessarena::chess {

enum class Color : std::uint8_t { white, black };

constexpr Color opposite(Color c) noexcept {
  return c == Color::white ? Color::black : Color::white;
}

std::string_view color_name(Color c) noexcept;  // "White" / "Black"

enum class PieceKind : std::uint8_t { pawn, knight, bishop, rook, queen, king };

struct Piece {
  PieceKind kind{PieceKind::pawn};
  Color color{Color::white};

  friend constexpr bool operator==(const Piece&, const Piece&) = default;

  /// FEN letter: uppercase for white, lowercase for black.
  char symbol() const noexcept;
  static std::optional<Piece> from_symbol(char c) noexcept;
};

/// Lowercase letter used for promotions in UCI ("q", "r", "b", "n").
char kind_letter(PieceKind k) noexcept;
std::optional<PieceKind> kind_from_letter(char c) noexcept;

struct Square {
  std::uint8_t file{0};  // 0..7 => a..h
  std::uint8_t rank{0};  // 0..7 => 1..8

  constexpr Square() = default;
  constexpr Square(int f, int r) : file(static_cast<std::uint8_t>(f)), rank(static_cast<std::uint8_t>(r)) {}

  static constexpr Square from_index(int idx) { return Square(idx & 7, idx >> 3); }
  constexpr int index() const noexcept { return rank * 8 + file; }

  static std::optional<Square> parse(std::string_view text) noexcept;
  std::string to_string() const;

  friend constexpr auto operator<=>(const Square&, const Square&) = default;
};

/// A resolved coordinate move; legality is relative to a board.
struct Move {
  Square from;
  Square to;
  std::optional<PieceKind> promotion;

  std::string uci() const;
  friend constexpr bool operator==(const Move&, const Move&) = default;
};

enum class Notation : std::uint8_t { uci, san };

/// A move as it was written, together with the coordinate move it names.
struct MoveToken {
  Move move;
  std::string surface;
  Notation notation{Notation::uci};

  std::string uci() const { return move.uci(); }
  friend bool operator==(const MoveToken& a, const MoveToken& b) { return a.move == b.move; }
};

class FenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllegalMoveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MoveParseError : public std::runtime_error {
 public:
  enum class Kind { unparseable, ambiguous, no_legal_match };
  MoveParseError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace chessarena::chess
