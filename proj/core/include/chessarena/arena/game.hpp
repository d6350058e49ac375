#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/chess/status.hpp"
#include "chessarena/engine/uci.hpp"
#include "chessarena/players/player.hpp"

namespace chessarena::arena {

/// Raised when a stop request ends a game early; the game is not saved.
class interrupted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlyRecord {
  int ply{0};  // 1-based
  chess::Color color{chess::Color::white};
  std::string player;
  std::string fen_before;
  std::string prompt_digest;
  std::vector<players::MoveAttempt> attempts;
  std::optional<chess::Move> move;  // empty on forfeit
  std::optional<double> q;
  std::optional<bool> in_top3;
};

struct GameRecord {
  std::string id;
  std::string white;
  std::string black;
  std::uint64_t seed{0};
  int index{0};
  std::vector<PlyRecord> plies;
  bool aborted{false};
  std::string abort_reason;
  std::optional<chess::Termination> termination;  // set iff finished
  std::optional<double> white_score;              // set iff finished
  std::string started_at;
  std::string finished_at;

  std::vector<chess::Move> moves() const;
  bool finished() const noexcept { return termination.has_value(); }
  std::optional<double> score_of(const std::string& player) const;
};

/// Content address of a game: players, seed and index within the match.
std::string game_id(const std::string& white, const std::string& black, std::uint64_t seed, int index);

using Annotator = std::function<engine::AnalysisTable(const std::string& fen)>;

struct GameConfig {
  int ply_cap{chess::kDefaultPlyCap};
  /// When set, every played ply gets its engine Q and top-3 flag after the game.
  Annotator annotator;
  /// Directory receiving games/<id>.jsonl; nothing is written when empty.
  std::filesystem::path run_dir;
  std::function<std::string()> clock;
  /// Checked before every ply.
  const std::atomic<bool>* stop{nullptr};
};

/// UTC time as 2024-06-11T09:15:02Z.
std::string utc_now();

/// Plays one game from the start position. Forfeits and rule terminations
/// are results; game_aborted from a player marks the record aborted.
GameRecord play_game(players::Player& white, players::Player& black, const GameConfig& cfg, std::uint64_t seed,
                     int index = 0);

void annotate_game(GameRecord& record, const Annotator& annotator);

/// Header object, one object per ply, footer object.
std::string game_to_jsonl(const GameRecord& record);
GameRecord game_from_jsonl(const std::string& text);

std::filesystem::path game_path(const std::filesystem::path& run_dir, const std::string& id);
void save_game(const std::filesystem::path& run_dir, const GameRecord& record);
/// nullopt when the file is missing or has no footer (an interrupted write).
std::optional<GameRecord> load_game(const std::filesystem::path& run_dir, const std::string& id);

/// Replays the chosen moves and checks every stored FEN, the termination
/// and the score. Returns a description of the first mismatch.
std::optional<std::string> verify_replay(const GameRecord& record, int ply_cap = chess::kDefaultPlyCap);

}  // namespace chessarena::arena
