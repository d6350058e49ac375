#include "chessarena/evals/moves.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chessarena/chess/notation.hpp"
#include "chessarena/util/fs.hpp"

namespace chessarena::evals {

using chess::Board;

nlohmann::ordered_json move_item_to_json(const MoveItem& item) {
  nlohmann::ordered_json j;
  j["fen"] = item.fen;
  j["history"] = nlohmann::ordered_json::array();
  for (const auto& m : item.history) j["history"].push_back(m.uci());
  j["analysis"] = engine::table_to_json(item.analysis);
  return j;
}

MoveItem move_item_from_json(const nlohmann::json& j) {
  MoveItem item;
  item.fen = j.at("fen").get<std::string>();
  Board board = Board::start();
  for (const auto& m : j.value("history", nlohmann::json::array())) {
    const auto mv = chess::parse_uci(m.get<std::string>());
    if (!mv) throw std::invalid_argument("bad history move in item " + item.fen);
    board = board.apply(*mv);
    item.history.push_back(*mv);
  }
  const Board at = Board::parse_fen(item.fen);
  if (!item.history.empty() && board.fen() != at.fen()) {
    throw std::invalid_argument("history does not lead to " + item.fen);
  }
  item.analysis = engine::table_from_json(j.at("analysis"));
  const auto legal = at.legal_moves();
  if (legal.empty()) throw std::invalid_argument("move item has no legal moves: " + item.fen);
  for (const auto& mv : legal) {
    if (!item.analysis.find(mv)) throw std::invalid_argument("analysis of " + item.fen + " lacks " + mv.uci());
  }
  if (item.analysis.evals.size() != legal.size()) throw std::invalid_argument("analysis of " + item.fen + " has extra moves");
  return item;
}

std::vector<MoveItem> load_move_items(const std::filesystem::path& path) {
  std::vector<MoveItem> out;
  std::istringstream in(util::read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(move_item_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

players::PromptContext move_item_context(const MoveItem& item) {
  players::PromptContext ctx;
  ctx.board = Board::parse_fen(item.fen);
  if (item.history.empty()) {
    ctx.start = ctx.board;
  } else {
    ctx.start = Board::start();
    ctx.moves = item.history;
  }
  return ctx;
}

double average_win_rate(const engine::AnalysisTable& t) {
  if (t.evals.empty()) return 0.0;
  double sum = 0;
  for (const auto& e : t.evals) sum += e.win_rate;
  return sum / static_cast<double>(t.evals.size());
}

std::optional<double> mar_contribution(const engine::AnalysisTable& t, const std::optional<chess::Move>& pred) {
  const double awr = average_win_rate(t);
  if (awr == 0.0) return std::nullopt;
  double q = 0.0;
  if (pred) {
    if (const auto* e = t.find(*pred)) q = e->win_rate;
  }
  return (q - awr) / awr;
}

double uniform_mar_stddev(std::span<const MoveItem> items) {
  double var_sum = 0;
  int n = 0;
  for (const auto& item : items) {
    const double awr = average_win_rate(item.analysis);
    if (awr == 0.0 || item.analysis.evals.empty()) continue;
    double sq = 0;
    for (const auto& e : item.analysis.evals) sq += std::pow((e.win_rate - awr) / awr, 2);
    var_sum += sq / static_cast<double>(item.analysis.evals.size());
    ++n;
  }
  return n == 0 ? 0.0 : 100.0 * std::sqrt(var_sum) / n;
}

MoveRow score_prediction(const MoveItem& item, const std::optional<chess::Move>& pred) {
  MoveRow row;
  row.prediction = pred;
  const auto* e = pred ? item.analysis.find(*pred) : nullptr;
  row.legal = e != nullptr;
  row.top = row.legal && item.analysis.is_top(*pred);
  if (e) row.q = e->win_rate;
  row.mar = mar_contribution(item.analysis, row.legal ? pred : std::nullopt);
  return row;
}

MoveReport aggregate_moves(std::vector<MoveRow> rows) {
  MoveReport r;
  int legal = 0;
  int top = 0;
  double mar_sum = 0;
  int mar_n = 0;
  for (const auto& row : rows) {
    legal += row.legal;
    top += row.top;
    if (row.mar) {
      mar_sum += *row.mar;
      ++mar_n;
    } else {
      ++r.degenerate;
    }
  }
  const double n = static_cast<double>(rows.size());
  if (!rows.empty()) {
    r.legal_rate = 100.0 * legal / n;
    r.top_rate = 100.0 * top / n;
  }
  if (mar_n > 0) r.mar = 100.0 * mar_sum / mar_n;
  r.rows = std::move(rows);
  return r;
}

MoveReport run_move_selection(players::Player& player, std::span<const MoveItem> items) {
  std::vector<MoveRow> rows;
  rows.reserve(items.size());
  for (const auto& item : items) {
    auto decision = player.request_move(move_item_context(item));
    auto row = score_prediction(item, decision.move);
    row.attempts = std::move(decision.attempts);
    rows.push_back(std::move(row));
  }
  return aggregate_moves(std::move(rows));
}

nlohmann::ordered_json move_row_to_json(const MoveRow& row) {
  nlohmann::ordered_json j;
  j["prediction"] = row.prediction ? nlohmann::ordered_json(row.prediction->uci()) : nlohmann::ordered_json(nullptr);
  j["legal"] = row.legal;
  j["top"] = row.top;
  j["q"] = row.q ? nlohmann::ordered_json(*row.q) : nlohmann::ordered_json(nullptr);
  j["mar"] = row.mar ? nlohmann::ordered_json(*row.mar) : nlohmann::ordered_json(nullptr);
  j["attempts"] = nlohmann::ordered_json::array();
  for (const auto& a : row.attempts) j["attempts"].push_back(players::attempt_to_json(a));
  return j;
}

}  // namespace chessarena::evals
