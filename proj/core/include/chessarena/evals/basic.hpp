#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/chess/board.hpp"
#include "chessarena/players/prompts.hpp"

namespace chessarena::evals {

enum class SquareCategory { own, opponent, empty };

std::string_view to_string(SquareCategory c);
SquareCategory square_category_from_string(std::string_view s);

struct BasicItem {
  std::string fen;
  chess::Square square;
  SquareCategory category{SquareCategory::own};
  std::optional<chess::Piece> piece;
  std::vector<chess::Move> legal;  // sorted by UCI

  friend bool operator==(const BasicItem&, const BasicItem&) = default;
};

/// Ground truth for (fen, square), computed from the move generator.
BasicItem make_basic_item(const std::string& fen, chess::Square square);

struct CategoryWeights {
  double own{0.85};
  double opponent{0.07};
  double empty{0.08};
};

/// n items; each draws a FEN uniformly, then a category by the weights
/// (renormalized over the categories the position offers), then a square
/// uniformly within the category.
std::vector<BasicItem> build_basic_understanding_set(std::span<const std::string> fens, std::size_t n,
                                                     std::uint64_t seed, CategoryWeights weights = {});

nlohmann::ordered_json basic_item_to_json(const BasicItem& item);
BasicItem basic_item_from_json(const nlohmann::json& j);

std::string basic_system_prompt();
std::vector<players::ChatMessage> basic_prompt(const BasicItem& item);

struct BasicAnswer {
  std::optional<std::string> piece;  // empty means "no piece"
  std::vector<std::string> moves;    // lower-case UCI strings, de-duplicated
};

/// Reads the last JSON object in the response (a ```json block if present).
std::optional<BasicAnswer> parse_basic_answer(std::string_view response);

struct BasicRow {
  bool parsed{false};
  bool piece_match{false};
  int true_positive{0};
  int predicted{0};
  int expected{0};
};

struct BasicScore {
  std::vector<BasicRow> rows;
  double pma{0};        // percent
  double precision{0};  // percent, micro-averaged
  double recall{0};     // percent, micro-averaged
};

BasicRow score_basic_item(const BasicItem& item, std::string_view response);
BasicScore score_basic_understanding(std::span<const BasicItem> items, std::span<const std::string> responses);
/// Aggregates recomputed from rows.
BasicScore aggregate_basic(std::vector<BasicRow> rows);

}  // namespace chessarena::evals
