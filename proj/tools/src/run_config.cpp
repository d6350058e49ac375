#include "run_config.hpp"

#include <cstdlib>
#include <set>

#include "chessarena/util/fs.hpp"
#include "chessarena/util/json_check.hpp"

namespace chessarena::cli {

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

void require_positive(int v, const char* key) {
  if (v <= 0) throw util::config_error(std::string("config.") + key + ": must be positive");
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw util::config_error("config: expected a JSON object");
  util::require_known_keys(j,
                           {"players", "rating", "engine", "concurrency", "run_dir", "seed", "games_per_match",
                            "ply_cap", "annotate", "retire_reliable"},
                           "config");
  RunConfig cfg;
  if (!j.contains("players") || !j["players"].is_array()) {
    throw util::config_error("config.players: missing required array");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j["players"].size(); ++i) {
    const auto& p = j["players"][i];
    if (!p.is_object()) throw util::config_error("config.players[" + std::to_string(i) + "]: expected an object");
    auto spec = players::player_spec_from_json(p);
    if (!ids.insert(spec.id).second) throw util::config_error("config.players: duplicate id '" + spec.id + "'");
    cfg.players.push_back(std::move(spec));
  }

  if (j.contains("rating")) {
    const auto& r = j["rating"];
    if (!r.is_object()) throw util::config_error("config.rating: expected an object");
    util::require_known_keys(r, {"init_r", "init_rd", "min_rd", "display_rd_threshold"}, "config.rating");
    cfg.rating.init_r = util::optional_or<double>(r, "init_r", cfg.rating.init_r, "config.rating");
    cfg.rating.init_rd = util::optional_or<double>(r, "init_rd", cfg.rating.init_rd, "config.rating");
    cfg.rating.min_rd = util::optional_or<double>(r, "min_rd", cfg.rating.min_rd, "config.rating");
    cfg.rating.display_rd_threshold =
        util::optional_or<double>(r, "display_rd_threshold", cfg.rating.display_rd_threshold, "config.rating");
    try {
      cfg.rating.validate();
    } catch (const std::invalid_argument& e) {
      throw util::config_error(std::string("config.rating: ") + e.what());
    }
  }

  if (j.contains("engine")) {
    const auto& e = j["engine"];
    if (!e.is_object()) throw util::config_error("config.engine: expected an object");
    util::require_known_keys(e, {"path", "depth", "threads", "hash_mb"}, "config.engine");
    cfg.engine.path = util::optional_or<std::string>(e, "path", "", "config.engine");
    cfg.engine.depth = util::optional_or<int>(e, "depth", cfg.engine.depth, "config.engine");
    cfg.engine.threads = util::optional_or<int>(e, "threads", cfg.engine.threads, "config.engine");
    cfg.engine.hash_mb = util::optional_or<int>(e, "hash_mb", cfg.engine.hash_mb, "config.engine");
    require_positive(cfg.engine.depth, "engine.depth");
    require_positive(cfg.engine.threads, "engine.threads");
    require_positive(cfg.engine.hash_mb, "engine.hash_mb");
  }

  cfg.concurrency = util::optional_or<int>(j, "concurrency", cfg.concurrency, "config");
  require_positive(cfg.concurrency, "concurrency");
  cfg.run_dir = util::optional_or<std::string>(j, "run_dir", "", "config");
  cfg.seed = util::optional_or<std::uint64_t>(j, "seed", 0, "config");
  cfg.games_per_match = util::optional_or<int>(j, "games_per_match", cfg.games_per_match, "config");
  if (cfg.games_per_match <= 0 || cfg.games_per_match % 2 != 0) {
    throw util::config_error("config.games_per_match: must be a positive even number");
  }
  cfg.ply_cap = util::optional_or<int>(j, "ply_cap", cfg.ply_cap, "config");
  require_positive(cfg.ply_cap, "ply_cap");
  cfg.annotate = util::optional_or<bool>(j, "annotate", false, "config");
  cfg.retire_reliable = util::optional_or<bool>(j, "retire_reliable", false, "config");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw util::config_error("config file not found: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(util::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw util::config_error(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

nlohmann::ordered_json run_config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["players"] = nlohmann::ordered_json::array();
  for (const auto& p : cfg.players) j["players"].push_back(players::player_spec_to_json(p));
  j["rating"] = {{"init_r", cfg.rating.init_r},
                 {"init_rd", cfg.rating.init_rd},
                 {"min_rd", cfg.rating.min_rd},
                 {"display_rd_threshold", cfg.rating.display_rd_threshold}};
  j["engine"] = {{"path", cfg.engine.path},
                 {"depth", cfg.engine.depth},
                 {"threads", cfg.engine.threads},
                 {"hash_mb", cfg.engine.hash_mb}};
  j["concurrency"] = cfg.concurrency;
  j["run_dir"] = cfg.run_dir.string();
  j["seed"] = cfg.seed;
  j["games_per_match"] = cfg.games_per_match;
  j["ply_cap"] = cfg.ply_cap;
  j["annotate"] = cfg.annotate;
  j["retire_reliable"] = cfg.retire_reliable;
  return j;
}

const players::PlayerSpec* find_player(const RunConfig& cfg, const std::string& id) {
  for (const auto& p : cfg.players) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::filesystem::path resolve_run_dir(const std::optional<std::string>& flag, const RunConfig* cfg) {
  if (flag) return *flag;
  if (auto e = env("CHESSARENA_RUN_DIR")) return *e;
  if (cfg != nullptr && !cfg->run_dir.empty()) return cfg->run_dir;
  return "run";
}

std::string resolve_engine_path(const std::optional<std::string>& flag, const RunConfig* cfg) {
  if (flag) return *flag;
  if (cfg != nullptr && !cfg->engine.path.empty()) return cfg->engine.path;
  if (auto e = env("CHESSARENA_ENGINE")) return *e;
  return "stockfish";
}

}  // namespace chessarena::cli
