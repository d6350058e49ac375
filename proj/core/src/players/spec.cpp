#include "chessarena/players/spec.hpp"

#include "chessarena/util/json_check.hpp"

namespace chessarena::players {

using util::config_error;

std::string_view to_string(PlayerKind k) {
  switch (k) {
    case PlayerKind::llm_api: return "llm_api";
    case PlayerKind::uci_engine: return "uci_engine";
    case PlayerKind::random: return "random";
  }
  return "random";
}

std::string_view to_string(PlayMode m) {
  switch (m) {
    case PlayMode::bullet: return "bullet";
    case PlayMode::blitz: return "blitz";
    case PlayMode::standard: return "standard";
    case PlayMode::blindfold: return "blindfold";
  }
  return "blitz";
}

std::string_view to_string(HistoryFormat h) {
  switch (h) {
    case HistoryFormat::uci_list: return "uci_list";
    case HistoryFormat::pgn: return "pgn";
    case HistoryFormat::none: return "none";
  }
  return "none";
}

PlayerKind player_kind_from_string(std::string_view s) {
  for (auto k : {PlayerKind::llm_api, PlayerKind::uci_engine, PlayerKind::random}) {
    if (to_string(k) == s) return k;
  }
  throw config_error("unknown player kind '" + std::string(s) + "'");
}

PlayMode play_mode_from_string(std::string_view s) {
  for (auto m : {PlayMode::bullet, PlayMode::blitz, PlayMode::standard, PlayMode::blindfold}) {
    if (to_string(m) == s) return m;
  }
  throw config_error("unknown play mode '" + std::string(s) + "'");
}

HistoryFormat history_format_from_string(std::string_view s) {
  for (auto h : {HistoryFormat::uci_list, HistoryFormat::pgn, HistoryFormat::none}) {
    if (to_string(h) == s) return h;
  }
  throw config_error("unknown history format '" + std::string(s) + "'");
}

std::string mode_label(PlayMode m) {
  std::string s(to_string(m));
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

PlayerSpec player_spec_from_json(const nlohmann::json& j) {
  util::require_known_keys(j, {"id", "kind", "mode", "legal_moves", "history", "history_plies", "model", "engine"},
                           "player");
  PlayerSpec s;
  s.id = util::required<std::string>(j, "id", "player");
  if (s.id.empty()) throw config_error("player.id: must not be empty");
  const std::string where = "player[" + s.id + "]";
  s.kind = player_kind_from_string(util::required<std::string>(j, "kind", where));
  s.mode = play_mode_from_string(util::optional_or<std::string>(j, "mode", "blitz", where));
  s.provide_legal_moves = util::optional_or<bool>(j, "legal_moves", false, where);
  s.history = history_format_from_string(util::optional_or<std::string>(j, "history", "uci_list", where));
  s.history_plies = util::optional_or<int>(j, "history_plies", 10, where);
  if (s.history_plies < 1) throw config_error(where + ".history_plies: must be positive");

  if (j.contains("model")) {
    const auto& m = j["model"];
    const std::string mw = where + ".model";
    util::require_known_keys(m, {"endpoint", "name", "api_key_env", "temperature", "top_p", "max_tokens", "thinking",
                                 "timeout_s"},
                             mw);
    s.model.endpoint = util::optional_or<std::string>(m, "endpoint", "", mw);
    s.model.name = util::optional_or<std::string>(m, "name", "", mw);
    s.model.api_key_env = util::optional_or<std::string>(m, "api_key_env", "", mw);
    s.model.temperature = util::optional_or<double>(m, "temperature", 0.2, mw);
    s.model.top_p = util::optional_or<double>(m, "top_p", 1.0, mw);
    s.model.max_tokens = util::optional_or<int>(m, "max_tokens", 0, mw);
    s.model.thinking = util::optional_or<bool>(m, "thinking", s.mode == PlayMode::standard, mw);
    s.model.timeout_s = util::optional_or<double>(m, "timeout_s", 300.0, mw);
    if (s.model.temperature < 0) throw config_error(mw + ".temperature: must be >= 0");
    if (s.model.top_p <= 0 || s.model.top_p > 1) throw config_error(mw + ".top_p: must be in (0, 1]");
  }
  if (j.contains("engine")) {
    const auto& e = j["engine"];
    const std::string ew = where + ".engine";
    util::require_known_keys(e, {"command", "depth", "nodes", "movetime_ms"}, ew);
    s.engine.command = util::optional_or<std::string>(e, "command", "", ew);
    if (e.contains("depth")) s.engine.depth = util::required<int>(e, "depth", ew);
    if (e.contains("nodes")) s.engine.nodes = util::required<long long>(e, "nodes", ew);
    if (e.contains("movetime_ms")) s.engine.movetime_ms = util::required<int>(e, "movetime_ms", ew);
  }
  if (s.kind == PlayerKind::llm_api && (s.model.endpoint.empty() || s.model.name.empty())) {
    throw config_error(where + ".model: endpoint and name are required for llm_api players");
  }
  if (s.kind == PlayerKind::random) s.provide_legal_moves = true;
  return s;
}

nlohmann::ordered_json player_spec_to_json(const PlayerSpec& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["kind"] = to_string(s.kind);
  j["mode"] = to_string(s.mode);
  j["legal_moves"] = s.provide_legal_moves;
  if (s.kind == PlayerKind::llm_api) {
    j["history"] = to_string(s.history);
    j["history_plies"] = s.history_plies;
    j["model"] = {{"endpoint", s.model.endpoint},       {"name", s.model.name},
                  {"api_key_env", s.model.api_key_env}, {"temperature", s.model.temperature},
                  {"top_p", s.model.top_p},             {"max_tokens", s.model.effective_max_tokens()},
                  {"thinking", s.model.thinking},       {"timeout_s", s.model.timeout_s}};
  }
  if (s.kind == PlayerKind::uci_engine) {
    nlohmann::ordered_json e;
    e["command"] = s.engine.command;
    if (s.engine.depth) e["depth"] = *s.engine.depth;
    if (s.engine.nodes) e["nodes"] = *s.engine.nodes;
    if (s.engine.movetime_ms) e["movetime_ms"] = *s.engine.movetime_ms;
    j["engine"] = std::move(e);
  }
  return j;
}

}  // namespace chessarena::players
