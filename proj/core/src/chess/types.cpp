#include "chessarena/chess/types.hpp"

#include <cctype>

namespace chessarena::chess {

std::string_view color_name(Color c) noexcept { return c == Color::white ? "White" : "Black"; }

char Piece::symbol() const noexcept {
  char lower = 'p';
  switch (kind) {
    case PieceKind::pawn: lower = 'p'; break;
    case PieceKind::knight: lower = 'n'; break;
    case PieceKind::bishop: lower = 'b'; break;
    case PieceKind::rook: lower = 'r'; break;
    case PieceKind::queen: lower = 'q'; break;
    case PieceKind::king: lower = 'k'; break;
  }
  return color == Color::white ? static_cast<char>(std::toupper(lower)) : lower;
}

std::optional<Piece> Piece::from_symbol(char c) noexcept {
  const Color color = std::isupper(static_cast<unsigned char>(c)) ? Color::white : Color::black;
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'p': return Piece{PieceKind::pawn, color};
    case 'n': return Piece{PieceKind::knight, color};
    case 'b': return Piece{PieceKind::bishop, color};
    case 'r': return Piece{PieceKind::rook, color};
    case 'q': return Piece{PieceKind::queen, color};
    case 'k': return Piece{PieceKind::king, color};
    default: return std::nullopt;
  }
}

char kind_letter(PieceKind k) noexcept { return Piece{k, Color::black}.symbol(); }

std::optional<PieceKind> kind_from_letter(char c) noexcept {
  auto p = Piece::from_symbol(c);
  if (!p) return std::nullopt;
  return p->kind;
}

std::optional<Square> Square::parse(std::string_view text) noexcept {
  if (text.size() != 2) return std::nullopt;
  const char f = text[0];
  const char r = text[1];
  if (f < 'a' || f > 'h' || r < '1' || r > '8') return std::nullopt;
  return Square(f - 'a', r - '1');
}

std::string Square::to_string() const {
  return {static_cast<char>('a' + file), static_cast<char>('1' + rank)};
}

std::string Move::uci() const {
  std::string s = from.to_string() + to.to_string();
  if (promotion) s.push_back(kind_letter(*promotion));
  return s;
}

}  // namespace chessarena::chess
