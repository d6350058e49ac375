#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chessarena/chess/board.hpp"

namespace chessarena::chess {

enum class TerminationReason {
  checkmate,
  forfeit,
  stalemate,
  insufficient_material,
  fivefold_repetition,
  seventy_five_move_rule,
  move_limit,
};

std::string_view to_string(TerminationReason r) noexcept;
std::optional<TerminationReason> termination_from_string(std::string_view s) noexcept;

/// Checkmate and forfeit are decisive; everything else is a draw.
constexpr bool is_decisive(TerminationReason r) noexcept {
  return r == TerminationReason::checkmate || r == TerminationReason::forfeit;
}

struct Termination {
  TerminationReason reason{TerminationReason::checkmate};
  std::optional<Color> winner;  // set iff is_decisive(reason)

  friend bool operator==(const Termination&, const Termination&) = default;
};

/// Repetition keys of every position reached so far, initial position included.
class PositionHistory {
 public:
  explicit PositionHistory(const Board& initial);

  void push(const Board& after_move);
  int plies() const noexcept { return static_cast<int>(keys_.size()) - 1; }
  int occurrences(const std::string& key) const;
  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

inline constexpr int kDefaultPlyCap = 400;

/// nullopt while the game is ongoing. Every rule terminates automatically;
/// nothing has to be claimed.
std::optional<Termination> game_status(const Board& board, const PositionHistory& history,
                                       int ply_cap = kDefaultPlyCap);

bool insufficient_material(const Board& board);

}  // namespace chessarena::chess
