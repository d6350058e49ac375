#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chessarena::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kInfraError = 2 };

/// Set by the SIGINT handler; games stop before their next ply.
std::atomic<bool>& stop_flag();

struct CommonArgs {
  std::optional<std::string> config;
  std::optional<std::string> run_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> concurrency;
  bool annotate{false};
  std::optional<std::string> engine;
  std::optional<int> depth;
};

struct TournamentArgs {
  CommonArgs common;
  int rounds{1};
  std::string startup{"random"};
};

struct MatchArgs {
  CommonArgs common;
  std::string a;
  std::string b;
  std::optional<int> n;
};

struct GameArgs {
  CommonArgs common;
  std::string white;
  std::string black;
  int index{0};
};

struct BasicEvalArgs {
  CommonArgs common;
  std::size_t n{200};
  std::optional<std::string> fens;
  std::optional<std::string> out;
  std::optional<std::string> player;
};

struct MovesEvalArgs {
  CommonArgs common;
  std::string items;
  std::string player;
  std::optional<std::string> out;
};

struct PuzzleEvalArgs {
  CommonArgs common;
  std::string csv;
  std::string player;
  std::size_t max{0};
  int min_rating{0};
  int max_rating{1 << 30};
  std::optional<std::string> out;
};

struct LeaderboardArgs {
  std::optional<std::string> run_dir;
  bool all{false};
  bool json{false};
};

struct EngineCheckArgs {
  CommonArgs common;
  std::string fen;
};

int cmd_tournament(const TournamentArgs& args, std::ostream& out);
int cmd_match(const MatchArgs& args, std::ostream& out);
int cmd_game(const GameArgs& args, std::ostream& out);
int cmd_eval_basic(const BasicEvalArgs& args, std::ostream& out);
int cmd_eval_moves(const MovesEvalArgs& args, std::ostream& out);
int cmd_eval_puzzles(const PuzzleEvalArgs& args, std::ostream& out);
int cmd_leaderboard(const LeaderboardArgs& args, std::ostream& out);
int cmd_engine_check(const EngineCheckArgs& args, std::ostream& out);

/// Parses argv, runs the subcommand and maps failures to exit codes:
/// 1 for usage and config errors, 2 for engine, network and interrupts.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace chessarena::cli
