#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chessarena/arena/game.hpp"
#include "chessarena/rating/pool.hpp"

namespace chessarena::arena {

struct MatchRequest {
  std::string a;
  std::string b;
  int n_games{2};
};

/// Builds the player for one side of one game.
using PlayerMaker = std::function<std::unique_ptr<players::Player>(
    const players::PlayerSpec& self, const players::PlayerSpec& opponent, chess::Color color, std::uint64_t game_seed)>;

/// make_player() with a per-side seed derived from the game seed.
PlayerMaker default_player_maker(players::PlayerFactory factory);

struct ArenaContext {
  std::vector<players::PlayerSpec> players;
  PlayerMaker make_player;
  GameConfig game;
  int concurrency{1};
};

struct TournamentConfig {
  int rounds{1};
  rating::StartupMode startup{rating::RandomStartup{}};
  int games_per_match{2};
  std::uint64_t seed{0};
  /// Reliable players (rd at or below the display threshold) stop initiating.
  bool retire_reliable{false};
};

struct RoundRecord {
  int round{0};
  std::string initiator;
  std::string opponent;
  double pairing_score{0};
  std::vector<std::string> games;
  double initiator_points{0};
  int aborted{0};
};

nlohmann::ordered_json round_to_json(const RoundRecord& r, const rating::Pool& after);

/// Pool entries for the given players at the configured initial rating.
rating::Pool initial_pool(const std::vector<players::PlayerSpec>& specs, const rating::RatingConfig& cfg);

/// Owns the rating book of one run. With a run directory set in the game
/// config, every rating update is appended to ratings.jsonl, and a rerun
/// reuses stored games and stored updates instead of repeating them.
class Arena {
 public:
  Arena(ArenaContext ctx, rating::Pool pool, rating::RatingConfig cfg);

  /// Plays n_games with colours alternating, a taking White first, then
  /// applies the rating updates in game order. Aborted games are returned
  /// but not rated.
  std::vector<GameRecord> run_match(const MatchRequest& req, std::uint64_t match_seed);

  std::vector<RoundRecord> run_tournament(const TournamentConfig& cfg);

  rating::RatingBook& book() noexcept { return book_; }
  const ArenaContext& context() const noexcept { return ctx_; }

  /// Writes pool.json, leaderboard.md and leaderboard.json.
  void write_artifacts() const;

 private:
  const players::PlayerSpec& spec(const std::string& id) const;
  GameRecord play_one(const std::string& white, const std::string& black, std::uint64_t seed, int index);
  void rate(const GameRecord& record);

  ArenaContext ctx_;
  rating::RatingBook book_;
  std::map<std::string, rating::RatingUpdate> stored_updates_;
  std::set<int> stored_rounds_;
};

std::filesystem::path pool_path(const std::filesystem::path& run_dir);

}  // namespace chessarena::arena
