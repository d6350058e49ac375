#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/players/player.hpp"

namespace chessarena::evals {

struct Puzzle {
  std::string id;
  std::string fen;
  std::vector<chess::Move> moves;  // moves[0] is the opponent's setup move
  int rating{0};
  std::vector<std::string> themes;
};

struct PuzzleFilter {
  int min_rating{0};
  int max_rating{1 << 30};
  std::size_t max_count{0};  // 0 means no limit
};

struct PuzzleLoad {
  std::vector<Puzzle> puzzles;
  std::size_t skipped{0};
};

class puzzle_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lichess puzzle CSV. Rows whose moves do not replay legally are skipped
/// and counted. Throws puzzle_error on a missing column or an empty file.
PuzzleLoad load_lichess_puzzles(const std::filesystem::path& path, const PuzzleFilter& filter = {});
PuzzleLoad parse_lichess_puzzles(const std::string& csv, const PuzzleFilter& filter = {});

struct PuzzleOutcome {
  std::string id;
  int rating{0};
  bool solved{false};
  int solver_moves{0};  // correct solver moves before the first miss
  std::optional<chess::Move> wrong_move;
};

/// Plays the setup move, then asks the player for every solver move from
/// the current position; the first mismatch fails the puzzle.
PuzzleOutcome run_puzzle(players::Player& player, const Puzzle& puzzle);

struct Bucket {
  int lo{0};
  int hi{0};
  int total{0};
  int solved{0};
  double psa() const { return total == 0 ? 0.0 : 100.0 * solved / total; }
};

struct PsaReport {
  std::vector<Bucket> buckets;  // non-empty buckets only, ascending
  int total{0};
  int solved{0};
  double overall() const { return total == 0 ? 0.0 : 100.0 * solved / total; }
};

/// Index of the 400-wide bucket starting at 200 that holds `rating`
/// (left-closed; 3000 joins the last bucket), or nullopt outside 200..3000.
std::optional<int> bucket_index(int rating);

PsaReport psa_report(std::span<const PuzzleOutcome> outcomes);

nlohmann::ordered_json puzzle_outcome_to_json(const PuzzleOutcome& o);
nlohmann::ordered_json psa_to_json(const PsaReport& r);
std::string psa_markdown(const PsaReport& r);

}  // namespace chessarena::evals
