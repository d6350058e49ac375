#include "chessarena/engine/uci.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include <spdlog/spdlog.h>

#include "chessarena/chess/notation.hpp"
#include "chessarena/util/fs.hpp"

namespace chessarena::engine {

namespace {

using namespace std::chrono_literals;

std::tuple<int, long long> score_key(const Score& s) {
  if (s.kind == Score::Kind::cp) return {1, s.value};
  if (s.value > 0) return {2, -static_cast<long long>(s.value)};
  return {0, -static_cast<long long>(s.value)};
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(std::move(t));
  return out;
}

struct InfoLine {
  int depth{0};
  int multipv{1};
  Score score;
  std::string first_move;
};

std::optional<InfoLine> parse_info(const std::string& line) {
  const auto t = tokens(line);
  if (t.empty() || t[0] != "info") return std::nullopt;
  InfoLine info;
  bool has_score = false;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const auto& w = t[i];
    try {
      if (w == "string") return std::nullopt;
      if (w == "depth" && i + 1 < t.size()) {
        info.depth = std::stoi(t[++i]);
      } else if (w == "multipv" && i + 1 < t.size()) {
        info.multipv = std::stoi(t[++i]);
      } else if (w == "score" && i + 2 < t.size()) {
        const bool mate = t[i + 1] == "mate";
        if (!mate && t[i + 1] != "cp") return std::nullopt;
        info.score = mate ? Score::mate_in(std::stoi(t[i + 2])) : Score::centipawns(std::stoi(t[i + 2]));
        has_score = true;
        i += 2;
        if (i + 1 < t.size() && (t[i + 1] == "lowerbound" || t[i + 1] == "upperbound")) return std::nullopt;
      } else if (w == "pv") {
        if (i + 1 < t.size()) info.first_move = t[i + 1];
        break;
      }
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (!has_score || info.first_move.empty() || info.depth == 0) return std::nullopt;
  return info;
}

}  // namespace

bool score_less(const Score& a, const Score& b) { return score_key(a) < score_key(b); }

double win_rate_from_score(const Score& s) {
  if (s.kind == Score::Kind::cp) return 1.0 / (1.0 + std::pow(10.0, -s.value / 400.0));
  if (s.value > 0) return std::max(0.95, 1.0 - 0.001 * s.value);
  return std::min(0.05, 0.001 * std::abs(s.value));
}

const MoveEval* AnalysisTable::find(const chess::Move& mv) const {
  auto it = std::find_if(evals.begin(), evals.end(), [&](const MoveEval& e) { return e.move == mv; });
  return it == evals.end() ? nullptr : &*it;
}

bool AnalysisTable::is_top(const chess::Move& mv) const {
  return std::find(top_moves.begin(), top_moves.end(), mv) != top_moves.end();
}

std::vector<chess::Move> compute_top_moves(const std::vector<MoveEval>& evals, std::size_t k) {
  std::vector<const MoveEval*> ranked;
  for (const auto& e : evals) ranked.push_back(&e);
  std::sort(ranked.begin(), ranked.end(), [](const MoveEval* a, const MoveEval* b) {
    if (a->win_rate != b->win_rate) return a->win_rate > b->win_rate;
    if (a->score != b->score) return score_less(b->score, a->score);
    return a->move.uci() < b->move.uci();
  });
  std::vector<chess::Move> top;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) top.push_back(ranked[i]->move);
  return top;
}

nlohmann::ordered_json table_to_json(const AnalysisTable& t) {
  nlohmann::ordered_json j;
  j["engine"] = t.engine;
  j["fen"] = t.fen;
  j["depth"] = t.depth;
  auto evals = nlohmann::ordered_json::array();
  for (const auto& e : t.evals) {
    nlohmann::ordered_json ej;
    ej["move"] = e.move.uci();
    ej[e.score.kind == Score::Kind::cp ? "cp" : "mate"] = e.score.value;
    ej["q"] = e.win_rate;
    evals.push_back(std::move(ej));
  }
  j["evals"] = std::move(evals);
  auto top = nlohmann::ordered_json::array();
  for (const auto& m : t.top_moves) top.push_back(m.uci());
  j["top_moves"] = std::move(top);
  return j;
}

AnalysisTable table_from_json(const nlohmann::json& j) {
  AnalysisTable t;
  t.engine = j.at("engine").get<std::string>();
  t.fen = j.at("fen").get<std::string>();
  t.depth = j.at("depth").get<int>();
  for (const auto& ej : j.at("evals")) {
    const auto mv = chess::parse_uci(ej.at("move").get<std::string>());
    if (!mv) throw std::invalid_argument("bad move in analysis table: " + ej.at("move").dump());
    const Score s = ej.contains("mate") ? Score::mate_in(ej["mate"].get<int>()) : Score::centipawns(ej.at("cp").get<int>());
    t.evals.push_back({*mv, s, win_rate_from_score(s)});
  }
  for (const auto& m : j.at("top_moves")) {
    const auto mv = chess::parse_uci(m.get<std::string>());
    if (!mv) throw std::invalid_argument("bad top move in analysis table");
    t.top_moves.push_back(*mv);
  }
  return t;
}

UciEngine UciEngine::start(const std::string& command, const EngineOptions& options) {
  UciEngine eng(Subprocess(split_command(command)), options);
  eng.send("uci");
  const auto deadline = std::chrono::steady_clock::now() + options.handshake_timeout;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    std::optional<std::string> line;
    if (left.count() > 0) line = eng.proc_.read_line(left);
    if (!line) throw engine_error(engine_error::Kind::handshake_timeout, "no uciok from " + command);
    if (line->rfind("id name ", 0) == 0) {
      eng.name_ = line->substr(8);
    } else if (line->rfind("option name ", 0) == 0) {
      const auto type_at = line->find(" type ");
      eng.advertised_.insert(line->substr(12, type_at == std::string::npos ? std::string::npos : type_at - 12));
    } else if (*line == "uciok") {
      break;
    }
  }
  if (eng.name_.empty()) eng.name_ = command;
  eng.set_option("Threads", std::to_string(options.threads));
  eng.set_option("Hash", std::to_string(options.hash_mb));
  for (const auto& [k, v] : options.extra) eng.set_option(k, v);
  eng.send("ucinewgame");
  eng.sync();
  return eng;
}

UciEngine::~UciEngine() {
  try {
    if (proc_.pid() > 0) proc_.write_line("quit");
  } catch (const engine_error&) {
  }
}

void UciEngine::send(const std::string& line) { proc_.write_line(line); }

std::string UciEngine::expect(const std::string& prefix, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    std::optional<std::string> line;
    if (left.count() > 0) line = proc_.read_line(left);
    if (!line) throw engine_error(engine_error::Kind::timeout, name_ + ": timed out waiting for " + prefix);
    if (line->rfind(prefix, 0) == 0) return *line;
  }
}

void UciEngine::sync() {
  send("isready");
  expect("readyok", options_.handshake_timeout);
}

void UciEngine::set_option(const std::string& name, const std::string& value) {
  if (!advertised_.contains(name)) {
    spdlog::warn("engine '{}' does not support option '{}'; skipped", name_, name);
    return;
  }
  send("setoption name " + name + " value " + value);
}

void UciEngine::set_multipv(int n) {
  if (n == multipv_) return;
  if (advertised_.contains("MultiPV")) send("setoption name MultiPV value " + std::to_string(n));
  multipv_ = n;
}

void UciEngine::new_game() {
  send("ucinewgame");
  sync();
}

std::vector<std::string> UciEngine::run_search(const std::string& fen, const std::string& go) {
  send("position fen " + fen);
  send(go);
  std::vector<std::string> lines;
  const auto deadline = std::chrono::steady_clock::now() + options_.search_timeout;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    std::optional<std::string> line;
    if (left.count() > 0) line = proc_.read_line(left);
    if (!line) {
      send("stop");
      throw engine_error(engine_error::Kind::timeout, name_ + ": search timed out on " + fen);
    }
    lines.push_back(*line);
    if (line->rfind("bestmove", 0) == 0) return lines;
  }
}

AnalysisTable UciEngine::analyze_all_moves(const std::string& fen, int depth) {
  if (depth < 1) throw std::invalid_argument("analysis depth must be at least 1");
  const auto board = chess::Board::parse_fen(fen);
  const auto legal = board.legal_moves();
  AnalysisTable table{name_, board.fen(), depth, {}, {}};
  if (legal.empty()) return table;

  new_game();
  const int width = static_cast<int>(legal.size());
  set_multipv(width);
  const auto lines = run_search(board.fen(), "go depth " + std::to_string(depth));

  std::map<int, std::map<int, InfoLine>> by_depth;
  for (const auto& l : lines) {
    if (auto info = parse_info(l)) by_depth[info->depth][info->multipv] = *info;
  }
  const std::map<int, InfoLine>* complete = nullptr;
  for (auto it = by_depth.rbegin(); it != by_depth.rend(); ++it) {
    if (static_cast<int>(it->second.size()) == width) {
      complete = &it->second;
      break;
    }
  }
  if (complete == nullptr) {
    throw engine_error(engine_error::Kind::protocol, name_ + ": incomplete multipv output for " + fen);
  }
  for (const auto& [k, info] : *complete) {
    const auto mv = chess::parse_uci(info.first_move);
    if (!mv || std::find(legal.begin(), legal.end(), *mv) == legal.end()) {
      throw engine_error(engine_error::Kind::protocol, name_ + ": analysis move " + info.first_move + " is not legal");
    }
    if (table.find(*mv) != nullptr) {
      throw engine_error(engine_error::Kind::protocol, name_ + ": move " + info.first_move + " reported twice");
    }
    table.evals.push_back({*mv, info.score, win_rate_from_score(info.score)});
  }
  std::sort(table.evals.begin(), table.evals.end(),
            [](const MoveEval& a, const MoveEval& b) { return a.move.uci() < b.move.uci(); });
  table.top_moves = compute_top_moves(table.evals);
  return table;
}

chess::Move UciEngine::best_move(const std::string& fen, const SearchLimits& limits) {
  const auto board = chess::Board::parse_fen(fen);
  std::string go = "go";
  if (limits.depth) go += " depth " + std::to_string(*limits.depth);
  if (limits.nodes) go += " nodes " + std::to_string(*limits.nodes);
  if (limits.movetime_ms) go += " movetime " + std::to_string(*limits.movetime_ms);
  if (go == "go") go += " depth 1";
  set_multipv(1);
  const auto lines = run_search(board.fen(), go);
  const auto t = tokens(lines.back());
  if (t.size() < 2 || t[1] == "(none)") {
    throw engine_error(engine_error::Kind::protocol, name_ + ": no best move in " + fen);
  }
  const auto mv = chess::parse_uci(t[1]);
  if (!mv || !board.is_legal(*mv)) {
    throw engine_error(engine_error::Kind::protocol, name_ + ": illegal best move " + t[1] + " in " + fen);
  }
  return *mv;
}

AnalysisCache::AnalysisCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(*path_)) return;
  std::istringstream in(util::read_file(*path_));
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto t = table_from_json(nlohmann::json::parse(line));
      const auto k = key(t.engine, t.fen, t.depth);
      by_position_[t.fen + "\n" + std::to_string(t.depth)] = k;
      tables_[k] = std::move(t);
    } catch (const std::exception& e) {
      spdlog::warn("{}:{}: skipping unreadable analysis entry ({})", path_->string(), lineno, e.what());
    }
  }
}

std::string AnalysisCache::key(const std::string& engine, const std::string& fen, int depth) {
  return engine + "\n" + fen + "\n" + std::to_string(depth);
}

std::optional<AnalysisTable> AnalysisCache::get(const std::string& engine, const std::string& fen, int depth) const {
  std::lock_guard lock(mu_);
  auto it = tables_.find(key(engine, fen, depth));
  if (it == tables_.end()) return std::nullopt;
  return it->second;
}

std::optional<AnalysisTable> AnalysisCache::get_any(const std::string& fen, int depth) const {
  std::lock_guard lock(mu_);
  auto it = by_position_.find(fen + "\n" + std::to_string(depth));
  if (it == by_position_.end()) return std::nullopt;
  return tables_.at(it->second);
}

void AnalysisCache::put(const AnalysisTable& table) {
  std::lock_guard lock(mu_);
  const auto k = key(table.engine, table.fen, table.depth);
  if (tables_.contains(k)) return;
  tables_[k] = table;
  by_position_[table.fen + "\n" + std::to_string(table.depth)] = k;
  if (path_) util::append_line(*path_, table_to_json(table).dump());
}

std::size_t AnalysisCache::size() const {
  std::lock_guard lock(mu_);
  return tables_.size();
}

AnalysisTable analyze_cached(UciEngine& engine, AnalysisCache& cache, const std::string& fen, int depth) {
  const std::string canonical = chess::Board::parse_fen(fen).fen();
  if (auto hit = cache.get(engine.name(), canonical, depth)) return *hit;
  auto table = engine.analyze_all_moves(canonical, depth);
  cache.put(table);
  return table;
}

}  // namespace chessarena::engine
