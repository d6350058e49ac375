#include "chessarena/chess/board.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace chessarena::chess {

namespace {

struct Offset {
  int df;
  int dr;
};

constexpr Offset kKnightSteps[] = {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr Offset kKingSteps[] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
constexpr Offset kDiagonals[] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
constexpr Offset kOrthogonals[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
constexpr PieceKind kPromotions[] = {PieceKind::queen, PieceKind::rook, PieceKind::bishop, PieceKind::knight};

constexpr bool on_board(int f, int r) { return f >= 0 && f < 8 && r >= 0 && r < 8; }

int forward(Color c) { return c == Color::white ? 1 : -1; }
int home_rank(Color c) { return c == Color::white ? 0 : 7; }

std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_counter(std::string_view field, const char* name) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
    throw FenError(std::string("invalid ") + name + " field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

Board Board::start() { return parse_fen(kStartFen); }

Board Board::parse_fen(std::string_view fen) {
  const auto fields = split_fields(fen);
  if (fields.size() != 6) {
    throw FenError("expected 6 FEN fields, got " + std::to_string(fields.size()));
  }

  Board b;
  int rank = 7;
  int file = 0;
  for (char c : fields[0]) {
    if (c == '/') {
      if (file != 8) throw FenError("rank " + std::to_string(rank + 1) + " does not have 8 squares");
      --rank;
      file = 0;
      if (rank < 0) throw FenError("too many ranks in placement");
      continue;
    }
    if (c >= '1' && c <= '8') {
      file += c - '0';
      if (file > 8) throw FenError("rank " + std::to_string(rank + 1) + " does not have 8 squares");
      continue;
    }
    auto piece = Piece::from_symbol(c);
    if (!piece) throw FenError(std::string("invalid piece symbol '") + c + "'");
    if (file >= 8) throw FenError("rank " + std::to_string(rank + 1) + " does not have 8 squares");
    b.squares_[Square(file, rank).index()] = piece;
    ++file;
  }
  if (rank != 0 || file != 8) throw FenError("placement must describe 8 ranks of 8 squares");

  if (fields[1] == "w") {
    b.side_ = Color::white;
  } else if (fields[1] == "b") {
    b.side_ = Color::black;
  } else {
    throw FenError("invalid side to move '" + std::string(fields[1]) + "'");
  }

  if (fields[2] != "-") {
    if (fields[2].size() > 4) throw FenError("invalid castling field '" + std::string(fields[2]) + "'");
    for (char c : fields[2]) {
      bool* flag = nullptr;
      switch (c) {
        case 'K': flag = &b.castling_.white_king; break;
        case 'Q': flag = &b.castling_.white_queen; break;
        case 'k': flag = &b.castling_.black_king; break;
        case 'q': flag = &b.castling_.black_queen; break;
        default: throw FenError("invalid castling field '" + std::string(fields[2]) + "'");
      }
      if (*flag) throw FenError("duplicate castling right in '" + std::string(fields[2]) + "'");
      *flag = true;
    }
  }

  if (fields[3] != "-") {
    auto ep = Square::parse(fields[3]);
    const int expected_rank = b.side_ == Color::white ? 5 : 2;
    if (!ep || ep->rank != expected_rank) {
      throw FenError("invalid en passant field '" + std::string(fields[3]) + "'");
    }
    b.en_passant_ = ep;
  }

  b.halfmove_ = parse_counter(fields[4], "halfmove clock");
  b.fullmove_ = parse_counter(fields[5], "fullmove number");
  if (b.fullmove_ < 1) throw FenError("fullmove number must be positive");

  b.validate();
  return b;
}

void Board::validate() const {
  int kings[2] = {0, 0};
  for (int i = 0; i < 64; ++i) {
    const auto& p = squares_[i];
    if (!p) continue;
    if (p->kind == PieceKind::king) ++kings[static_cast<int>(p->color)];
    if (p->kind == PieceKind::pawn && (i < 8 || i >= 56)) {
      throw FenError("pawn on first or last rank at " + Square::from_index(i).to_string());
    }
  }
  if (kings[0] != 1 || kings[1] != 1) throw FenError("each side must have exactly one king");
  if (is_square_attacked(*king_square(opposite(side_)), side_)) {
    throw FenError("side not to move is in check");
  }
}

std::string Board::fen() const {
  std::ostringstream out;
  for (int rank = 7; rank >= 0; --rank) {
    int empty = 0;
    for (int file = 0; file < 8; ++file) {
      const auto& p = squares_[Square(file, rank).index()];
      if (!p) {
        ++empty;
        continue;
      }
      if (empty) out << empty;
      empty = 0;
      out << p->symbol();
    }
    if (empty) out << empty;
    if (rank) out << '/';
  }
  out << ' ' << (side_ == Color::white ? 'w' : 'b') << ' ';
  std::string rights;
  if (castling_.white_king) rights += 'K';
  if (castling_.white_queen) rights += 'Q';
  if (castling_.black_king) rights += 'k';
  if (castling_.black_queen) rights += 'q';
  out << (rights.empty() ? "-" : rights) << ' ';
  out << (en_passant_ ? en_passant_->to_string() : "-") << ' ' << halfmove_ << ' ' << fullmove_;
  return out.str();
}

std::optional<Square> Board::king_square(Color c) const {
  for (int i = 0; i < 64; ++i) {
    const auto& p = squares_[i];
    if (p && p->kind == PieceKind::king && p->color == c) return Square::from_index(i);
  }
  return std::nullopt;
}

bool Board::is_square_attacked(Square sq, Color by) const {
  const int f = sq.file;
  const int r = sq.rank;
  auto holds = [&](int ff, int rr, PieceKind k) {
    if (!on_board(ff, rr)) return false;
    const auto& p = squares_[Square(ff, rr).index()];
    return p && p->color == by && p->kind == k;
  };

  // A pawn of `by` attacks from one rank behind, relative to its own direction.
  const int pr = r - forward(by);
  if (holds(f - 1, pr, PieceKind::pawn) || holds(f + 1, pr, PieceKind::pawn)) return true;
  for (auto [df, dr] : kKnightSteps) {
    if (holds(f + df, r + dr, PieceKind::knight)) return true;
  }
  for (auto [df, dr] : kKingSteps) {
    if (holds(f + df, r + dr, PieceKind::king)) return true;
  }
  auto slide = [&](const auto& dirs, PieceKind a, PieceKind b) {
    for (auto [df, dr] : dirs) {
      int ff = f + df;
      int rr = r + dr;
      while (on_board(ff, rr)) {
        const auto& p = squares_[Square(ff, rr).index()];
        if (p) {
          if (p->color == by && (p->kind == a || p->kind == b)) return true;
          break;
        }
        ff += df;
        rr += dr;
      }
    }
    return false;
  };
  return slide(kDiagonals, PieceKind::bishop, PieceKind::queen) ||
         slide(kOrthogonals, PieceKind::rook, PieceKind::queen);
}

bool Board::in_check() const { return is_square_attacked(*king_square(side_), opposite(side_)); }

void Board::pseudo_legal_moves(std::vector<Move>& out) const {
  const Color us = side_;
  const Color them = opposite(us);

  auto push_target = [&](Square from, int f, int r) {
    // Returns false when the ray must stop.
    if (!on_board(f, r)) return false;
    const auto& p = squares_[Square(f, r).index()];
    if (p && p->color == us) return false;
    out.push_back(Move{from, Square(f, r), std::nullopt});
    return !p;
  };

  for (int i = 0; i < 64; ++i) {
    const auto& p = squares_[i];
    if (!p || p->color != us) continue;
    const Square from = Square::from_index(i);
    const int f = from.file;
    const int r = from.rank;

    switch (p->kind) {
      case PieceKind::pawn: {
        const int dir = forward(us);
        const int last = us == Color::white ? 7 : 0;
        auto add_pawn = [&](Square to) {
          if (to.rank == last) {
            for (auto k : kPromotions) out.push_back(Move{from, to, k});
          } else {
            out.push_back(Move{from, to, std::nullopt});
          }
        };
        const int r1 = r + dir;
        if (on_board(f, r1) && !squares_[Square(f, r1).index()]) {
          add_pawn(Square(f, r1));
          const int start_rank = us == Color::white ? 1 : 6;
          const int r2 = r + 2 * dir;
          if (r == start_rank && !squares_[Square(f, r2).index()]) {
            out.push_back(Move{from, Square(f, r2), std::nullopt});
          }
        }
        for (int df : {-1, 1}) {
          const int ff = f + df;
          if (!on_board(ff, r1)) continue;
          const Square to(ff, r1);
          const auto& target = squares_[to.index()];
          if ((target && target->color == them) || (en_passant_ && *en_passant_ == to)) add_pawn(to);
        }
        break;
      }
      case PieceKind::knight:
        for (auto [df, dr] : kKnightSteps) push_target(from, f + df, r + dr);
        break;
      case PieceKind::bishop:
      case PieceKind::rook:
      case PieceKind::queen: {
        auto ray = [&](const auto& dirs) {
          for (auto [df, dr] : dirs) {
            int ff = f + df;
            int rr = r + dr;
            while (push_target(from, ff, rr)) {
              ff += df;
              rr += dr;
            }
          }
        };
        if (p->kind != PieceKind::rook) ray(kDiagonals);
        if (p->kind != PieceKind::bishop) ray(kOrthogonals);
        break;
      }
      case PieceKind::king: {
        for (auto [df, dr] : kKingSteps) push_target(from, f + df, r + dr);
        const int home = home_rank(us);
        if (f != 4 || r != home) break;
        const bool king_side = us == Color::white ? castling_.white_king : castling_.black_king;
        const bool queen_side = us == Color::white ? castling_.white_queen : castling_.black_queen;
        auto rook_at = [&](int ff) {
          const auto& q = squares_[Square(ff, home).index()];
          return q && q->color == us && q->kind == PieceKind::rook;
        };
        auto empty = [&](int ff) { return !squares_[Square(ff, home).index()]; };
        auto safe = [&](int ff) { return !is_square_attacked(Square(ff, home), them); };
        if ((king_side || queen_side) && !safe(4)) break;
        if (king_side && rook_at(7) && empty(5) && empty(6) && safe(5) && safe(6)) {
          out.push_back(Move{from, Square(6, home), std::nullopt});
        }
        if (queen_side && rook_at(0) && empty(1) && empty(2) && empty(3) && safe(3) && safe(2)) {
          out.push_back(Move{from, Square(2, home), std::nullopt});
        }
        break;
      }
    }
  }
}

Board Board::apply_unchecked(const Move& mv) const {
  Board next = *this;
  const Piece moving = *squares_[mv.from.index()];
  const bool capture = squares_[mv.to.index()].has_value();
  const Color us = side_;

  next.squares_[mv.from.index()].reset();
  next.en_passant_.reset();

  bool ep_capture = false;
  if (moving.kind == PieceKind::pawn) {
    if (en_passant_ && mv.to == *en_passant_ && mv.from.file != mv.to.file && !capture) {
      ep_capture = true;
      next.squares_[Square(mv.to.file, mv.from.rank).index()].reset();
    }
    if (std::abs(mv.to.rank - mv.from.rank) == 2) {
      next.en_passant_ = Square(mv.from.file, (mv.from.rank + mv.to.rank) / 2);
    }
  }

  Piece placed = moving;
  if (mv.promotion) placed.kind = *mv.promotion;
  next.squares_[mv.to.index()] = placed;

  if (moving.kind == PieceKind::king && std::abs(mv.to.file - mv.from.file) == 2) {
    const int home = mv.from.rank;
    const bool king_side = mv.to.file == 6;
    const int rook_from = king_side ? 7 : 0;
    const int rook_to = king_side ? 5 : 3;
    next.squares_[Square(rook_to, home).index()] = next.squares_[Square(rook_from, home).index()];
    next.squares_[Square(rook_from, home).index()].reset();
  }

  auto clear_corner = [&](Square sq) {
    if (sq == Square(0, 0)) next.castling_.white_queen = false;
    if (sq == Square(7, 0)) next.castling_.white_king = false;
    if (sq == Square(0, 7)) next.castling_.black_queen = false;
    if (sq == Square(7, 7)) next.castling_.black_king = false;
  };
  if (moving.kind == PieceKind::king) {
    if (us == Color::white) {
      next.castling_.white_king = next.castling_.white_queen = false;
    } else {
      next.castling_.black_king = next.castling_.black_queen = false;
    }
  }
  clear_corner(mv.from);
  clear_corner(mv.to);

  next.halfmove_ = (moving.kind == PieceKind::pawn || capture || ep_capture) ? 0 : halfmove_ + 1;
  if (us == Color::black) ++next.fullmove_;
  next.side_ = opposite(us);
  return next;
}

void Board::legal_unsorted(std::vector<Move>& out) const {
  std::vector<Move> pseudo;
  pseudo.reserve(64);
  pseudo_legal_moves(pseudo);
  for (const auto& mv : pseudo) {
    const Board next = apply_unchecked(mv);
    if (!next.is_square_attacked(*next.king_square(side_), next.side_)) out.push_back(mv);
  }
}

std::vector<Move> Board::legal_moves() const {
  std::vector<Move> legal;
  legal_unsorted(legal);
  std::vector<std::pair<std::string, Move>> keyed;
  keyed.reserve(legal.size());
  for (const auto& mv : legal) keyed.emplace_back(mv.uci(), mv);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Move> out;
  out.reserve(keyed.size());
  for (auto& [_, mv] : keyed) out.push_back(mv);
  return out;
}

bool Board::is_legal(const Move& mv) const {
  const auto moves = legal_moves();
  return std::find(moves.begin(), moves.end(), mv) != moves.end();
}

Board Board::apply(const Move& mv) const {
  if (!is_legal(mv)) {
    throw IllegalMoveError("illegal move " + mv.uci() + " in " + fen());
  }
  return apply_unchecked(mv);
}

bool Board::has_legal_en_passant() const {
  if (!en_passant_) return false;
  for (const auto& mv : legal_moves()) {
    const auto& p = squares_[mv.from.index()];
    if (p->kind == PieceKind::pawn && mv.to == *en_passant_) return true;
  }
  return false;
}

std::string Board::repetition_key() const {
  std::string full = fen();
  // Drop the two clock fields, then normalise the en passant field.
  auto cut = full.rfind(' ');
  cut = full.rfind(' ', cut - 1);
  full.resize(cut);
  const auto ep_pos = full.rfind(' ');
  full.resize(ep_pos + 1);
  full += has_legal_en_passant() ? en_passant_->to_string() : "-";
  return full;
}

SquareMoves legal_moves_for_square(const Board& board, Square sq) {
  SquareMoves out;
  out.piece = board.at(sq);
  if (!out.piece || out.piece->color != board.side_to_move()) return out;
  for (const auto& mv : board.legal_moves()) {
    if (mv.from == sq) out.moves.push_back(mv);
  }
  return out;
}

std::uint64_t Board::perft_nodes(const Board& board, int depth) {
  std::vector<Move> moves;
  moves.reserve(64);
  board.legal_unsorted(moves);
  if (depth == 1) return moves.size();
  std::uint64_t nodes = 0;
  for (const auto& mv : moves) nodes += perft_nodes(board.apply_unchecked(mv), depth - 1);
  return nodes;
}

std::uint64_t perft(const Board& board, int depth) {
  if (depth <= 0) return 1;
  return Board::perft_nodes(board, depth);
}

}  // namespace chessarena::chess
