#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chessarena/arena/arena.hpp"
#include "chessarena/chess/notation.hpp"
#include "chessarena/rating/glicko.hpp"
#include "chessarena/util/hash.hpp"

namespace chessarena::testing {

inline players::PlayerSpec random_spec(const std::string& id) {
  players::PlayerSpec s;
  s.id = id;
  s.kind = players::PlayerKind::random;
  s.provide_legal_moves = true;
  return s;
}

/// Plays a fixed move list in a loop.
class ScriptedMovesPlayer : public players::Player {
 public:
  ScriptedMovesPlayer(players::PlayerSpec spec, std::vector<std::string> moves)
      : Player(std::move(spec)), moves_(std::move(moves)) {}
  players::MoveDecision request_move(const players::PromptContext&) override {
    const auto mv = *chess::parse_uci(moves_[next_++ % moves_.size()]);
    return {mv, {}, "scripted"};
  }

 private:
  std::vector<std::string> moves_;
  std::size_t next_{0};
};

/// Forfeits on its first turn.
class ForfeitPlayer : public players::Player {
 public:
  using Player::Player;
  players::MoveDecision request_move(const players::PromptContext&) override {
    players::MoveAttempt a;
    a.index = 1;
    a.outcome = players::AttemptOutcome::parsing_error;
    return {std::nullopt, {a}, "forfeit"};
  }
};

/// Raises game_aborted on its first turn.
class AbortingPlayer : public players::Player {
 public:
  using Player::Player;
  players::MoveDecision request_move(const players::PromptContext&) override {
    throw players::game_aborted("endpoint unreachable");
  }
};

/// Random mover that raises a stop flag after a number of moves.
class StoppingPlayer : public players::Player {
 public:
  StoppingPlayer(players::PlayerSpec spec, std::uint64_t seed, std::atomic<bool>& stop, std::atomic<int>& budget)
      : Player(std::move(spec)), rng_(seed), stop_(stop), budget_(budget) {}
  players::MoveDecision request_move(const players::PromptContext& ctx) override {
    if (--budget_ <= 0) stop_ = true;
    return {players::random_player_move(ctx.board, rng_), {}, ""};
  }

 private:
  util::Rng rng_;
  std::atomic<bool>& stop_;
  std::atomic<int>& budget_;
};

/// Results drawn from the expected-score formula at the players' true
/// strengths; the loser forfeits on its first turn.
inline arena::PlayerMaker simulated_maker(std::map<std::string, double> strength) {
  return [strength = std::move(strength)](const players::PlayerSpec& self, const players::PlayerSpec& opp,
                                          chess::Color color, std::uint64_t seed) -> std::unique_ptr<players::Player> {
    const double p_self = rating::expected_score(strength.at(self.id), strength.at(opp.id), 0.0);
    const double p_white = color == chess::Color::white ? p_self : 1.0 - p_self;
    const bool white_wins = util::Rng(util::mix64(seed)).uniform01() < p_white;
    const bool self_loses = white_wins != (color == chess::Color::white);
    if (self_loses) return std::make_unique<ForfeitPlayer>(self);
    return std::make_unique<players::RandomPlayer>(self, seed);
  };
}

/// Deterministic stand-in for engine analysis: every legal move gets a
/// win rate from its hash; the top three follow the usual ranking.
inline engine::AnalysisTable synthetic_analysis(const std::string& fen) {
  const auto board = chess::Board::parse_fen(fen);
  engine::AnalysisTable t;
  t.engine = "synthetic";
  t.fen = fen;
  t.depth = 1;
  for (const auto& mv : board.legal_moves()) {
    const int cp = static_cast<int>(util::fnv1a64(fen + mv.uci()) % 601) - 300;
    const engine::Score s{engine::Score::Kind::cp, cp};
    t.evals.push_back({mv, s, engine::win_rate_from_score(s)});
  }
  t.top_moves = engine::compute_top_moves(t.evals);
  return t;
}

}  // namespace chessarena::testing
