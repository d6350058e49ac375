#pragma once

#include <cstdint>
#include <string>

#include "chessarena/rating/pool.hpp"
#include "chessarena/util/rng.hpp"

namespace chessarena::testing {

/// Games a fresh entrant needs before its rd drops below `target_rd` in a
/// pool of nine settled players with fixed true strengths. Opponents come
/// from sample_opponent; results are Bernoulli draws with the true-strength
/// expected score. Returns max_games + 1 when the target is never reached.
inline int games_to_reliable(std::uint64_t seed, double target_rd = 100.0, int max_games = 200) {
  using namespace chessarena::rating;
  util::Rng rng(seed);
  RatingConfig cfg;
  Pool pool;
  std::vector<double> truth;
  for (int i = 0; i < 9; ++i) {
    const double strength = 900.0 + 175.0 * i;
    const double rd = 50.0 + 50.0 * rng.uniform01();
    pool.push_back({"p" + std::to_string(i), {strength, rd, 30}, true, "blitz", false});
    truth.push_back(strength);
  }
  const double entrant_truth = 900.0 + 1400.0 * rng.uniform01();
  pool.push_back({"entrant", RatingState::fresh(cfg), true, "blitz", false});
  truth.push_back(entrant_truth);

  for (int game = 1; game <= max_games; ++game) {
    PoolEntry& me = pool.back();
    const PoolEntry& opp = sample_opponent(pool, me);
    const auto idx = static_cast<std::size_t>(&opp - pool.data());
    const double p_win = expected_score(entrant_truth, truth[idx], 0.0);
    const MatchOutcome outcome = rng.uniform01() < p_win ? MatchOutcome::win : MatchOutcome::loss;
    auto [mine, theirs] = update_game(me.rating, opp.rating, outcome, cfg);
    pool[idx].rating = theirs;
    me.rating = mine;
    if (me.rating.rd < target_rd) return game;
  }
  return max_games + 1;
}

}  // namespace chessarena::testing
