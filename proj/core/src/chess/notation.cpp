#include "chessarena/chess/notation.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace chessarena::chess {

namespace {

bool is_trim_char(char c) {
  static constexpr std::string_view kTrim = " \t\r\n`'\".,;:!?()[]{}<>*+#";
  return kTrim.find(c) != std::string_view::npos;
}

std::string_view trim_noise(std::string_view s) {
  while (!s.empty() && is_trim_char(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_trim_char(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

PieceKind kind_on(const Board& board, Square sq) { return board.at(sq)->kind; }

}  // namespace

std::optional<Move> parse_uci(std::string_view text) {
  static const std::regex kUci("^([a-h][1-8])[-x]?([a-h][1-8])=?([qrbn])?$");
  const std::string s = lower(text);
  std::smatch m;
  if (!std::regex_match(s, m, kUci)) return std::nullopt;
  Move mv{*Square::parse(m[1].str()), *Square::parse(m[2].str()), std::nullopt};
  if (m[3].matched) mv.promotion = kind_from_letter(m[3].str()[0]);
  if (mv.from == mv.to) return std::nullopt;
  return mv;
}

Move parse_san(std::string_view text, const Board& board) {
  std::string s(trim_noise(text));
  if (s.empty()) throw MoveParseError(MoveParseError::Kind::unparseable, "empty move text");

  const auto legal = board.legal_moves();
  auto castle = [&](bool king_side) {
    const int home = board.side_to_move() == Color::white ? 0 : 7;
    const Move mv{Square(4, home), Square(king_side ? 6 : 2, home), std::nullopt};
    const auto king = board.at(mv.from);
    if (!king || king->kind != PieceKind::king || std::find(legal.begin(), legal.end(), mv) == legal.end()) {
      throw MoveParseError(MoveParseError::Kind::no_legal_match, "castling is not legal here: " + s);
    }
    return mv;
  };
  if (s == "O-O" || s == "0-0" || s == "o-o") return castle(true);
  if (s == "O-O-O" || s == "0-0-0" || s == "o-o-o") return castle(false);

  static const std::regex kSan("^([NBRQK])?([a-h])?([1-8])?(x)?([a-h][1-8])(=?([NBRQnbrq]))?$");
  std::smatch m;
  if (!std::regex_match(s, m, kSan)) {
    throw MoveParseError(MoveParseError::Kind::unparseable, "not a move: " + std::string(text));
  }
  const PieceKind kind = m[1].matched ? *kind_from_letter(m[1].str()[0]) : PieceKind::pawn;
  const Square to = *Square::parse(m[5].str());
  std::optional<PieceKind> promo;
  if (m[7].matched) promo = kind_from_letter(m[7].str()[0]);
  if (promo && kind != PieceKind::pawn) {
    throw MoveParseError(MoveParseError::Kind::unparseable, "only pawns promote: " + s);
  }

  std::vector<Move> candidates;
  for (const auto& mv : legal) {
    if (mv.to != to || kind_on(board, mv.from) != kind || mv.promotion != promo) continue;
    if (m[2].matched && mv.from.file != m[2].str()[0] - 'a') continue;
    if (m[3].matched && mv.from.rank != m[3].str()[0] - '1') continue;
    candidates.push_back(mv);
  }
  if (candidates.empty()) {
    throw MoveParseError(MoveParseError::Kind::no_legal_match, "no legal move matches " + s);
  }
  if (candidates.size() > 1) {
    throw MoveParseError(MoveParseError::Kind::ambiguous, "ambiguous move " + s);
  }
  return candidates.front();
}

MoveToken parse_move(std::string_view text, const Board& board) {
  const std::string_view core = trim_noise(text);
  if (auto mv = parse_uci(core)) {
    return MoveToken{*mv, std::string(text), Notation::uci};
  }
  return MoveToken{parse_san(core, board), std::string(text), Notation::san};
}

std::string move_to_san(const Board& board, const Move& mv) {
  const auto legal = board.legal_moves();
  if (std::find(legal.begin(), legal.end(), mv) == legal.end()) {
    throw IllegalMoveError("illegal move " + mv.uci() + " in " + board.fen());
  }
  const Piece piece = *board.at(mv.from);
  std::string san;

  if (piece.kind == PieceKind::king && std::abs(mv.to.file - mv.from.file) == 2) {
    san = mv.to.file == 6 ? "O-O" : "O-O-O";
  } else if (piece.kind == PieceKind::pawn) {
    const bool capture = mv.from.file != mv.to.file;
    if (capture) {
      san += static_cast<char>('a' + mv.from.file);
      san += 'x';
    }
    san += mv.to.to_string();
    if (mv.promotion) {
      san += '=';
      san += Piece{*mv.promotion, Color::white}.symbol();
    }
  } else {
    san += Piece{piece.kind, Color::white}.symbol();
    bool clash = false;
    bool same_file = false;
    bool same_rank = false;
    for (const auto& other : legal) {
      if (other.to != mv.to || other.from == mv.from || kind_on(board, other.from) != piece.kind) continue;
      clash = true;
      if (other.from.file == mv.from.file) same_file = true;
      if (other.from.rank == mv.from.rank) same_rank = true;
    }
    if (clash) {
      if (!same_file) {
        san += static_cast<char>('a' + mv.from.file);
      } else if (!same_rank) {
        san += static_cast<char>('1' + mv.from.rank);
      } else {
        san += mv.from.to_string();
      }
    }
    if (board.at(mv.to)) san += 'x';
    san += mv.to.to_string();
  }

  const Board next = board.apply(mv);
  if (next.in_check()) san += next.legal_moves().empty() ? '#' : '+';
  return san;
}

std::string moves_to_pgn(const Board& start, std::span<const Move> moves) {
  std::string out;
  Board board = start;
  bool first = true;
  for (const auto& mv : moves) {
    if (!first) out += ' ';
    if (board.side_to_move() == Color::white) {
      out += std::to_string(board.fullmove_number()) + ". ";
    } else if (first) {
      out += std::to_string(board.fullmove_number()) + "... ";
    }
    out += move_to_san(board, mv);
    board = board.apply(mv);
    first = false;
  }
  return out;
}

}  // namespace chessarena::chess
