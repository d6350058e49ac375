#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/arena/game.hpp"
#include "chessarena/rating/pool.hpp"

namespace chessarena::arena {

struct LeaderboardEntry {
  int rank{0};
  std::string id;
  std::string mode;
  bool legal_moves{false};
  double r{0};
  double rd{0};
  long lo{0};
  long hi{0};
  int games{0};
};

/// Entries with rd at or below the threshold (all entries when include_all),
/// by rating descending, ties by id. Interval is round(r -/+ 1.96 rd).
std::vector<LeaderboardEntry> compute_leaderboard(std::span<const rating::PoolEntry> pool,
                                                  double rd_threshold = 100.0, bool include_all = false);

/// Rank | Model | Mode | Legal Moves | Rating | RD | Interval | Games
std::string leaderboard_markdown(const std::vector<LeaderboardEntry>& board);
nlohmann::ordered_json leaderboard_json(const std::vector<LeaderboardEntry>& board);

struct SecondaryMetrics {
  int wins{0};
  int losses{0};
  int draws{0};
  int plies{0};
  int attempts{0};
  double parsing_err_rate{0};
  double illegal_move_rate{0};
  double forbidden_rate{0};
  double legal_move_rate{0};
  /// Over annotated plies only; empty when none are annotated.
  std::optional<double> top_move_rate;
};

/// Error rates are per attempt, legal and top rates per ply. Aborted games
/// and transport failures are left out.
SecondaryMetrics compute_secondary_metrics(std::span<const GameRecord> records, const std::string& player);

nlohmann::ordered_json metrics_to_json(const SecondaryMetrics& m);

}  // namespace chessarena::arena
