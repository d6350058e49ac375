#pragma once

#include <string_view>

#include "chessarena/engine/uci.hpp"

namespace chessarena::evals {

struct RewardWeights {
  double format{0.1};
  double legal{0.3};
  double top{0.6};
};

struct Reward {
  bool format{false};  // a fenced move inside the last <answer> block
  bool legal{false};
  bool top{false};
  double value{0};
};

/// Throws std::invalid_argument when the oracle is for another position.
Reward rl_reward(std::string_view response, std::string_view fen, const engine::AnalysisTable& oracle,
                 RewardWeights weights = {});

}  // namespace chessarena::evals
