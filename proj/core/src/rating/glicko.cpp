#include "chessarena/rating/glicko.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace chessarena::rating {

void RatingConfig::validate() const {
  if (!(min_rd > 0.0) || !(min_rd < init_rd)) throw std::invalid_argument("rating config needs 0 < min_rd < init_rd");
  if (!(q > 0.0)) throw std::invalid_argument("rating config needs q > 0");
  if (!std::isfinite(init_r)) throw std::invalid_argument("rating config needs a finite init_r");
}

MatchOutcome outcome_from_score(double s) {
  if (s == 1.0) return MatchOutcome::win;
  if (s == 0.5) return MatchOutcome::draw;
  if (s == 0.0) return MatchOutcome::loss;
  throw std::invalid_argument("match score must be 0, 0.5 or 1");
}

double g(double rd, double q) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return 1.0 / std::sqrt(1.0 + 3.0 * q * q * rd * rd / pi2);
}

double expected_score(double r, double r_opp, double rd_opp, double q) {
  return 1.0 / (1.0 + std::pow(10.0, -g(rd_opp, q) * (r - r_opp) / 400.0));
}

double d_squared(double r, double r_opp, double rd_opp, double q) {
  const double e = expected_score(r, r_opp, rd_opp, q);
  const double go = g(rd_opp, q);
  return 1.0 / (q * q * go * go * e * (1.0 - e));
}

RatingState update_rating(const RatingState& me, const RatingState& opp, MatchOutcome outcome,
                          const RatingConfig& cfg) {
  const double q = cfg.q;
  const double e = expected_score(me.r, opp.r, opp.rd, q);
  const double d2 = d_squared(me.r, opp.r, opp.rd, q);
  const double precision = 1.0 / (me.rd * me.rd) + 1.0 / d2;
  RatingState next = me;
  next.r = me.r + q / precision * g(opp.rd, q) * (score_of(outcome) - e);
  const double rd_new = std::sqrt(1.0 / precision);
  next.rd = std::min(me.rd, std::max(cfg.min_rd, rd_new));
  next.games_played = me.games_played + 1;
  return next;
}

std::pair<RatingState, RatingState> update_game(const RatingState& white, const RatingState& black,
                                                MatchOutcome white_outcome, const RatingConfig& cfg) {
  return {update_rating(white, black, white_outcome, cfg), update_rating(black, white, reversed(white_outcome), cfg)};
}

double pairing_score(const RatingState& a, const RatingState& b, double q) {
  const double e = expected_score(a.r, b.r, b.rd, q);
  const double ga = g(a.rd, q);
  const double gb = g(b.rd, q);
  return e * (1.0 - e) * (ga * ga + gb * gb);
}

}  // namespace chessarena::rating
