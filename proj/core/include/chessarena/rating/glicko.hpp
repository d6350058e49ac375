#pragma once

#include <cmath>
#include <utility>

namespace chessarena::rating {

inline const double kGlickoQ = std::log(10.0) / 400.0;

struct RatingConfig {
  double init_r{1500.0};
  double init_rd{350.0};
  double min_rd{50.0};
  double display_rd_threshold{100.0};
  double q{kGlickoQ};

  /// Throws std::invalid_argument unless 0 < min_rd < init_rd and q > 0.
  void validate() const;
};

struct RatingState {
  double r{1500.0};
  double rd{350.0};
  int games_played{0};

  static RatingState fresh(const RatingConfig& cfg) { return {cfg.init_r, cfg.init_rd, 0}; }
  friend bool operator==(const RatingState&, const RatingState&) = default;
};

enum class MatchOutcome { loss, draw, win };

constexpr double score_of(MatchOutcome o) noexcept {
  switch (o) {
    case MatchOutcome::win: return 1.0;
    case MatchOutcome::draw: return 0.5;
    case MatchOutcome::loss: return 0.0;
  }
  return 0.0;
}

/// Accepts exactly 0, 0.5 or 1; anything else throws std::invalid_argument.
MatchOutcome outcome_from_score(double s);

constexpr MatchOutcome reversed(MatchOutcome o) noexcept {
  return o == MatchOutcome::win ? MatchOutcome::loss : o == MatchOutcome::loss ? MatchOutcome::win : o;
}

/// Attenuation factor for an opponent's deviation.
double g(double rd, double q = kGlickoQ);

double expected_score(double r, double r_opp, double rd_opp, double q = kGlickoQ);

double d_squared(double r, double r_opp, double rd_opp, double q = kGlickoQ);

/// One-game Glicko update of `me` against the opponent's pre-game state.
/// The new deviation never drops below cfg.min_rd and never rises.
RatingState update_rating(const RatingState& me, const RatingState& opp, MatchOutcome outcome,
                          const RatingConfig& cfg);

/// Updates both sides of one game from their pre-game snapshots.
std::pair<RatingState, RatingState> update_game(const RatingState& white, const RatingState& black,
                                                MatchOutcome white_outcome, const RatingConfig& cfg);

/// Expected deviation reduction for pairing a with b:
/// E(1-E) * (g(rd_a)^2 + g(rd_b)^2), E taken from a's side against b.
double pairing_score(const RatingState& a, const RatingState& b, double q = kGlickoQ);

}  // namespace chessarena::rating
