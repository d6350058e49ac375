#include "chessarena/evals/reward.hpp"

#include <sstream>
#include <stdexcept>

#include "chessarena/chess/notation.hpp"
#include "chessarena/players/extract.hpp"

namespace chessarena::evals {

Reward rl_reward(std::string_view response, std::string_view fen, const engine::AnalysisTable& oracle,
                 RewardWeights weights) {
  const auto board = chess::Board::parse_fen(fen);
  if (chess::Board::parse_fen(oracle.fen).fen() != board.fen()) {
    throw std::invalid_argument("oracle analysis is for " + oracle.fen);
  }
  Reward r;
  if (const auto block = players::answer_block(response)) {
    std::istringstream words(*block);
    std::string word, extra;
    if (words >> word && !(words >> extra)) {
      try {
        chess::parse_move(word, board);
        r.format = true;
      } catch (const chess::MoveParseError& e) {
        r.format = e.kind() != chess::MoveParseError::Kind::unparseable;
      }
    }
  }
  const auto attempt = players::extract_move(response, players::PlayMode::blitz, board);
  if (attempt.move) {
    r.legal = true;
    r.top = oracle.is_top(attempt.move->move);
  }
  r.value = weights.format * r.format + weights.legal * r.legal + weights.top * r.top;
  return r;
}

}  // namespace chessarena::evals
