#include "chessarena/arena/leaderboard.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

namespace chessarena::arena {

std::vector<LeaderboardEntry> compute_leaderboard(std::span<const rating::PoolEntry> pool, double rd_threshold,
                                                  bool include_all) {
  std::vector<LeaderboardEntry> out;
  for (const auto& e : pool) {
    if (!include_all && e.rating.rd > rd_threshold) continue;
    LeaderboardEntry le;
    le.id = e.id;
    le.mode = e.mode;
    le.legal_moves = e.legal_moves_flag;
    le.r = e.rating.r;
    le.rd = e.rating.rd;
    le.lo = std::lround(e.rating.r - 1.96 * e.rating.rd);
    le.hi = std::lround(e.rating.r + 1.96 * e.rating.rd);
    le.games = e.rating.games_played;
    out.push_back(std::move(le));
  }
  std::sort(out.begin(), out.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.r != b.r) return a.r > b.r;
    return a.id < b.id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

std::string leaderboard_markdown(const std::vector<LeaderboardEntry>& board) {
  std::string out = "| Rank | Model | Mode | Legal Moves | Rating | RD | Interval | Games |\n";
  out += "|---:|---|---|:---:|---:|---:|---|---:|\n";
  for (const auto& e : board) {
    std::string mode = e.mode;
    if (!mode.empty()) mode[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(mode[0])));
    out += fmt::format("| {} | {} | {} | {} | {} | {} | ({}, {}) | {} |\n", e.rank, e.id, mode,
                       e.legal_moves ? "yes" : "no", std::lround(e.r), std::lround(e.rd), e.lo, e.hi, e.games);
  }
  return out;
}

nlohmann::ordered_json leaderboard_json(const std::vector<LeaderboardEntry>& board) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : board) {
    nlohmann::ordered_json j;
    j["rank"] = e.rank;
    j["model"] = e.id;
    j["mode"] = e.mode;
    j["legal_moves"] = e.legal_moves;
    j["rating"] = e.r;
    j["rd"] = e.rd;
    j["interval"] = {e.lo, e.hi};
    j["games"] = e.games;
    arr.push_back(std::move(j));
  }
  return arr;
}

SecondaryMetrics compute_secondary_metrics(std::span<const GameRecord> records, const std::string& player) {
  SecondaryMetrics m;
  int parsing = 0;
  int illegal = 0;
  int forbidden = 0;
  int first_legal = 0;
  int annotated = 0;
  int top = 0;
  for (const auto& g : records) {
    const auto score = g.score_of(player);
    if (!score) continue;
    if (*score == 1.0) {
      ++m.wins;
    } else if (*score == 0.0) {
      ++m.losses;
    } else {
      ++m.draws;
    }
    for (const auto& p : g.plies) {
      if (p.player != player) continue;
      ++m.plies;
      bool first = true;
      for (const auto& a : p.attempts) {
        if (a.outcome == players::AttemptOutcome::transport_error) continue;
        ++m.attempts;
        if (first && a.outcome == players::AttemptOutcome::ok) ++first_legal;
        first = false;
        if (a.outcome == players::AttemptOutcome::parsing_error) ++parsing;
        if (a.outcome == players::AttemptOutcome::illegal_move) ++illegal;
        if (a.outcome == players::AttemptOutcome::forbidden_thinking) ++forbidden;
      }
      if (p.in_top3) {
        ++annotated;
        if (*p.in_top3) ++top;
      }
    }
  }
  auto ratio = [](int num, int den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; };
  m.parsing_err_rate = ratio(parsing, m.attempts);
  m.illegal_move_rate = ratio(illegal, m.attempts);
  m.forbidden_rate = ratio(forbidden, m.attempts);
  m.legal_move_rate = ratio(first_legal, m.plies);
  if (annotated > 0) m.top_move_rate = ratio(top, annotated);
  return m;
}

nlohmann::ordered_json metrics_to_json(const SecondaryMetrics& m) {
  nlohmann::ordered_json j;
  j["wins"] = m.wins;
  j["losses"] = m.losses;
  j["draws"] = m.draws;
  j["plies"] = m.plies;
  j["attempts"] = m.attempts;
  j["parsing_err_rate"] = m.parsing_err_rate;
  j["illegal_move_rate"] = m.illegal_move_rate;
  j["forbidden_rate"] = m.forbidden_rate;
  j["legal_move_rate"] = m.legal_move_rate;
  j["top_move_rate"] = m.top_move_rate ? nlohmann::ordered_json(*m.top_move_rate) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace chessarena::arena
