#include "chessarena/chess/status.hpp"

#include <algorithm>
#include <array>

namespace chessarena::chess {

namespace {

constexpr std::array<std::pair<TerminationReason, std::string_view>, 7> kNames{{
    {TerminationReason::checkmate, "checkmate"},
    {TerminationReason::forfeit, "forfeit"},
    {TerminationReason::stalemate, "stalemate"},
    {TerminationReason::insufficient_material, "insufficient_material"},
    {TerminationReason::fivefold_repetition, "fivefold_repetition"},
    {TerminationReason::seventy_five_move_rule, "seventy_five_move_rule"},
    {TerminationReason::move_limit, "move_limit"},
}};

}  // namespace

std::string_view to_string(TerminationReason r) noexcept {
  for (const auto& [reason, name] : kNames) {
    if (reason == r) return name;
  }
  return "unknown";
}

std::optional<TerminationReason> termination_from_string(std::string_view s) noexcept {
  for (const auto& [reason, name] : kNames) {
    if (name == s) return reason;
  }
  return std::nullopt;
}

PositionHistory::PositionHistory(const Board& initial) { keys_.push_back(initial.repetition_key()); }

void PositionHistory::push(const Board& after_move) { keys_.push_back(after_move.repetition_key()); }

int PositionHistory::occurrences(const std::string& key) const {
  return static_cast<int>(std::count(keys_.begin(), keys_.end(), key));
}

bool insufficient_material(const Board& board) {
  struct Minor {
    PieceKind kind;
    Color color;
    int square_shade;
  };
  std::vector<Minor> others;
  for (int i = 0; i < 64; ++i) {
    const auto p = board.at(Square::from_index(i));
    if (!p || p->kind == PieceKind::king) continue;
    if (p->kind != PieceKind::bishop && p->kind != PieceKind::knight) return false;
    const Square sq = Square::from_index(i);
    others.push_back({p->kind, p->color, (sq.file + sq.rank) % 2});
    if (others.size() > 2) return false;
  }
  if (others.empty()) return true;   // K vs K
  if (others.size() == 1) return true;  // K+B vs K, K+N vs K
  // K+B vs K+B with both bishops on the same square colour.
  const auto& a = others[0];
  const auto& b = others[1];
  return a.kind == PieceKind::bishop && b.kind == PieceKind::bishop && a.color != b.color &&
         a.square_shade == b.square_shade;
}

std::optional<Termination> game_status(const Board& board, const PositionHistory& history, int ply_cap) {
  if (board.legal_moves().empty()) {
    if (board.in_check()) return Termination{TerminationReason::checkmate, opposite(board.side_to_move())};
    return Termination{TerminationReason::stalemate, std::nullopt};
  }
  if (insufficient_material(board)) return Termination{TerminationReason::insufficient_material, std::nullopt};
  if (!history.keys().empty() && history.occurrences(history.keys().back()) >= 5) {
    return Termination{TerminationReason::fivefold_repetition, std::nullopt};
  }
  if (board.halfmove_clock() >= 150) return Termination{TerminationReason::seventy_five_move_rule, std::nullopt};
  if (board.fullmove_number() > ply_cap / 2) return Termination{TerminationReason::move_limit, std::nullopt};
  return std::nullopt;
}

}  // namespace chessarena::chess
