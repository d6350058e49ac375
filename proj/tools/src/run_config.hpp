#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/players/spec.hpp"
#include "chessarena/rating/glicko.hpp"

namespace chessarena::cli {

struct EngineConfig {
  std::string path;
  int depth{12};
  int threads{1};
  int hash_mb{16};
};

struct RunConfig {
  std::vector<players::PlayerSpec> players;
  rating::RatingConfig rating;
  EngineConfig engine;
  int concurrency{1};
  std::filesystem::path run_dir;
  std::uint64_t seed{0};
  int games_per_match{2};
  int ply_cap{400};
  bool annotate{false};
  bool retire_reliable{false};
};

/// Strict parse; unknown keys and bad values throw util::config_error
/// naming the offending key.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::ordered_json run_config_to_json(const RunConfig& cfg);

const players::PlayerSpec* find_player(const RunConfig& cfg, const std::string& id);

/// Flag, else $CHESSARENA_RUN_DIR, else the config value, else ./run.
std::filesystem::path resolve_run_dir(const std::optional<std::string>& flag, const RunConfig* cfg);

/// Flag, else the config engine path, else $CHESSARENA_ENGINE, else "stockfish".
std::string resolve_engine_path(const std::optional<std::string>& flag, const RunConfig* cfg);

}  // namespace chessarena::cli
