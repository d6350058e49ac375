#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/chess/board.hpp"
#include "chessarena/engine/subprocess.hpp"

namespace chessarena::engine {

/// Engine score from the side to move's point of view.
struct Score {
  enum class Kind { cp, mate };
  Kind kind{Kind::cp};
  int value{0};

  static Score centipawns(int c) { return {Kind::cp, c}; }
  static Score mate_in(int n) { return {Kind::mate, n}; }
  friend bool operator==(const Score&, const Score&) = default;
};

/// Total order on raw scores: mates for the mover (shorter first), then
/// centipawns, then mates against (longer first).
bool score_less(const Score& a, const Score& b);

/// cp -> 1/(1+10^(-cp/400)); mate in n>0 -> max(0.95, 1-0.001n);
/// mated in |n| -> min(0.05, 0.001|n|).
double win_rate_from_score(const Score& s);

struct MoveEval {
  chess::Move move;
  Score score;
  double win_rate{0.5};
};

struct AnalysisTable {
  std::string engine;
  std::string fen;
  int depth{0};
  std::vector<MoveEval> evals;          // sorted by UCI
  std::vector<chess::Move> top_moves;   // best first, at most three

  const MoveEval* find(const chess::Move& mv) const;
  bool is_top(const chess::Move& mv) const;
};

/// Ranks evals by win rate, then raw score, then UCI; keeps the best three.
std::vector<chess::Move> compute_top_moves(const std::vector<MoveEval>& evals, std::size_t k = 3);

nlohmann::ordered_json table_to_json(const AnalysisTable& t);
AnalysisTable table_from_json(const nlohmann::json& j);

struct EngineOptions {
  int threads{1};
  int hash_mb{16};
  std::vector<std::pair<std::string, std::string>> extra;
  std::chrono::milliseconds handshake_timeout{10'000};
  std::chrono::milliseconds search_timeout{600'000};
};

struct SearchLimits {
  std::optional<int> depth;
  std::optional<long long> nodes;
  std::optional<int> movetime_ms;
};

/// One UCI engine process. A handle runs one search at a time and is not
/// safe to share between threads.
class UciEngine {
 public:
  /// Spawns `command`, completes the uci/isready handshake and applies
  /// options. Options the engine does not advertise are logged and skipped.
  static UciEngine start(const std::string& command, const EngineOptions& options = {});

  UciEngine(UciEngine&&) noexcept = default;
  UciEngine& operator=(UciEngine&&) noexcept = default;
  ~UciEngine();

  const std::string& name() const noexcept { return name_; }
  const std::set<std::string>& advertised_options() const noexcept { return advertised_; }

  /// Evaluates every legal move of `fen` at `depth` via MultiPV. A terminal
  /// position yields an empty table without consulting the engine.
  AnalysisTable analyze_all_moves(const std::string& fen, int depth);

  /// Engine's choice in `fen`; throws engine_error(protocol) for "(none)" or
  /// an illegal reply.
  chess::Move best_move(const std::string& fen, const SearchLimits& limits);

  void new_game();

 private:
  UciEngine(Subprocess proc, EngineOptions options) : proc_(std::move(proc)), options_(std::move(options)) {}

  void send(const std::string& line);
  std::string expect(const std::string& prefix, std::chrono::milliseconds timeout);
  void sync();
  void set_option(const std::string& name, const std::string& value);
  void set_multipv(int n);
  std::vector<std::string> run_search(const std::string& fen, const std::string& go);

  Subprocess proc_;
  EngineOptions options_;
  std::string name_;
  std::set<std::string> advertised_;
  int multipv_{1};
};

/// Analysis tables keyed by (engine, fen, depth), persisted as JSON lines.
/// Safe to share across threads.
class AnalysisCache {
 public:
  AnalysisCache() = default;
  /// Loads `path` if it exists; new tables are appended to it.
  explicit AnalysisCache(std::filesystem::path path);

  std::optional<AnalysisTable> get(const std::string& engine, const std::string& fen, int depth) const;
  /// Any engine's table for (fen, depth); used with frozen fixtures.
  std::optional<AnalysisTable> get_any(const std::string& fen, int depth) const;
  void put(const AnalysisTable& table);
  std::size_t size() const;

 private:
  static std::string key(const std::string& engine, const std::string& fen, int depth);

  mutable std::mutex mu_;
  std::optional<std::filesystem::path> path_;
  std::map<std::string, AnalysisTable> tables_;
  std::map<std::string, std::string> by_position_;
};

AnalysisTable analyze_cached(UciEngine& engine, AnalysisCache& cache, const std::string& fen, int depth);

}  // namespace chessarena::engine
