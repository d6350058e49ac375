#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/engine/uci.hpp"
#include "chessarena/players/player.hpp"

namespace chessarena::evals {

struct MoveItem {
  std::string fen;
  std::vector<chess::Move> history;  // from the standard start position
  engine::AnalysisTable analysis;
};

nlohmann::ordered_json move_item_to_json(const MoveItem& item);
/// Checks that the history leads to the FEN and that the analysis covers
/// every legal move.
MoveItem move_item_from_json(const nlohmann::json& j);
std::vector<MoveItem> load_move_items(const std::filesystem::path& path);

players::PromptContext move_item_context(const MoveItem& item);

/// Average win rate over all legal moves.
double average_win_rate(const engine::AnalysisTable& t);

/// (Q(pred) - AWR) / AWR with Q = 0 for a missing or illegal prediction;
/// nullopt when AWR is zero.
std::optional<double> mar_contribution(const engine::AnalysisTable& t, const std::optional<chess::Move>& pred);

/// Standard deviation, in percent, of the MAR a uniformly random legal player
/// scores on `items`. Its expectation is exactly zero.
double uniform_mar_stddev(std::span<const MoveItem> items);

struct MoveRow {
  std::optional<chess::Move> prediction;
  std::vector<players::MoveAttempt> attempts;
  bool legal{false};
  bool top{false};
  std::optional<double> q;
  std::optional<double> mar;  // nullopt for a degenerate position
};

struct MoveReport {
  std::vector<MoveRow> rows;
  double legal_rate{0};  // percent
  double top_rate{0};    // percent
  double mar{0};         // percent
  int degenerate{0};     // positions left out of MAR
};

MoveRow score_prediction(const MoveItem& item, const std::optional<chess::Move>& pred);
MoveReport aggregate_moves(std::vector<MoveRow> rows);

/// One request per item; the player decides how many attempts it makes.
MoveReport run_move_selection(players::Player& player, std::span<const MoveItem> items);

nlohmann::ordered_json move_row_to_json(const MoveRow& row);

}  // namespace chessarena::evals
