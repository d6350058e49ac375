#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace chessarena::players {

enum class PlayerKind { llm_api, uci_engine, random };
enum class PlayMode { bullet, blitz, standard, blindfold };
enum class HistoryFormat { uci_list, pgn, none };

std::string_view to_string(PlayerKind k);
std::string_view to_string(PlayMode m);
std::string_view to_string(HistoryFormat h);
PlayerKind player_kind_from_string(std::string_view s);
PlayMode play_mode_from_string(std::string_view s);
HistoryFormat history_format_from_string(std::string_view s);

/// Display form used in leaderboards: "Blitz", "Bullet", ...
std::string mode_label(PlayMode m);

struct ModelParams {
  std::string endpoint;
  std::string name;
  std::string api_key_env;
  double temperature{0.2};
  double top_p{1.0};
  /// 0 selects the default: 16384 for thinking models, 4096 otherwise.
  int max_tokens{0};
  bool thinking{false};
  double timeout_s{300.0};

  int effective_max_tokens() const noexcept { return max_tokens > 0 ? max_tokens : (thinking ? 16384 : 4096); }
};

struct EngineParams {
  std::string command;
  std::optional<int> depth;
  std::optional<long long> nodes;
  std::optional<int> movetime_ms;
};

struct PlayerSpec {
  std::string id;
  PlayerKind kind{PlayerKind::random};
  PlayMode mode{PlayMode::blitz};
  bool provide_legal_moves{false};
  HistoryFormat history{HistoryFormat::uci_list};
  int history_plies{10};
  ModelParams model;
  EngineParams engine;
};

/// Strict parse: unknown keys and bad values throw util::config_error.
PlayerSpec player_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json player_spec_to_json(const PlayerSpec& spec);

}  // namespace chessarena::players
