#include "chessarena/evals/basic.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "chessarena/util/rng.hpp"

namespace chessarena::evals {

using chess::Board;
using chess::Square;

std::string_view to_string(SquareCategory c) {
  switch (c) {
    case SquareCategory::own: return "own";
    case SquareCategory::opponent: return "opponent";
    case SquareCategory::empty: return "empty";
  }
  return "own";
}

SquareCategory square_category_from_string(std::string_view s) {
  for (auto c : {SquareCategory::own, SquareCategory::opponent, SquareCategory::empty}) {
    if (to_string(c) == s) return c;
  }
  throw std::invalid_argument("unknown square category '" + std::string(s) + "'");
}

BasicItem make_basic_item(const std::string& fen, Square square) {
  const Board board = Board::parse_fen(fen);
  const auto sm = chess::legal_moves_for_square(board, square);
  BasicItem item;
  item.fen = board.fen();
  item.square = square;
  item.piece = sm.piece;
  item.legal = sm.moves;
  if (!sm.piece) {
    item.category = SquareCategory::empty;
  } else {
    item.category = sm.piece->color == board.side_to_move() ? SquareCategory::own : SquareCategory::opponent;
  }
  return item;
}

std::vector<BasicItem> build_basic_understanding_set(std::span<const std::string> fens, std::size_t n,
                                                     std::uint64_t seed, CategoryWeights weights) {
  if (fens.empty()) throw std::invalid_argument("basic understanding set needs at least one FEN");
  util::Rng rng(seed);
  std::vector<BasicItem> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Board board = Board::parse_fen(fens[rng.uniform_index(fens.size())]);
    std::vector<Square> by_cat[3];
    for (int idx = 0; idx < 64; ++idx) {
      const Square sq = Square::from_index(idx);
      const auto piece = board.at(sq);
      const int cat = !piece ? 2 : (piece->color == board.side_to_move() ? 0 : 1);
      by_cat[cat].push_back(sq);
    }
    const double w[3] = {by_cat[0].empty() ? 0 : weights.own, by_cat[1].empty() ? 0 : weights.opponent,
                         by_cat[2].empty() ? 0 : weights.empty};
    const double total = w[0] + w[1] + w[2];
    const double u = rng.uniform01() * total;
    int cat = 2;
    if (u < w[0]) {
      cat = 0;
    } else if (u < w[0] + w[1]) {
      cat = 1;
    }
    while (by_cat[cat].empty()) cat = (cat + 1) % 3;
    const Square sq = by_cat[cat][rng.uniform_index(by_cat[cat].size())];
    out.push_back(make_basic_item(board.fen(), sq));
  }
  return out;
}

nlohmann::ordered_json basic_item_to_json(const BasicItem& item) {
  nlohmann::ordered_json j;
  j["fen"] = item.fen;
  j["square"] = item.square.to_string();
  j["category"] = to_string(item.category);
  j["piece"] = item.piece ? nlohmann::ordered_json(std::string(1, item.piece->symbol())) : nlohmann::ordered_json(nullptr);
  j["legal_moves"] = nlohmann::ordered_json::array();
  for (const auto& m : item.legal) j["legal_moves"].push_back(m.uci());
  return j;
}

BasicItem basic_item_from_json(const nlohmann::json& j) {
  const auto sq = Square::parse(j.at("square").get<std::string>());
  if (!sq) throw std::invalid_argument("bad square in basic item");
  BasicItem item = make_basic_item(j.at("fen").get<std::string>(), *sq);
  if (nlohmann::json::parse(basic_item_to_json(item).dump()) != j) {
    throw std::invalid_argument("basic item for " + item.fen + " " + sq->to_string() + " disagrees with the rules");
  }
  return item;
}

std::string basic_system_prompt() {
  return "You are an expert chess player.I need you to help me model a chessboard.The specific steps are as follows:\n"
         "I will provide you with a FEN string representing the current board state,and then give you a position."
         "You need to identify the piece at that position from the FEN and output all legal moves for that piece.\n"
         "You must carefully analyze the board, consider the rules of chess, and provide the final answer.\n"
         "\n"
         "Your answer should be format as follows(output a json):\n"
         "```json\n"
         "{\n"
         "  \"piece\": <piece symbol>,\n"
         "  \"legal moves\": [<list of legal moves>]\n"
         "}\n"
         "```\n"
         "\n"
         "For example:\n"
         "FEN: rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1\n"
         "Position:g1\n"
         "Answer:\n"
         "```json\n"
         "{\n"
         "  \"piece\": \"N\",\n"
         "  \"legal moves\": [\"g1h3\", \"g1f3\"]\n"
         "}\n"
         "```\n"
         "Note:\n"
         "If the given position has no piece, directly output empty(i.e.,None), and the corresponding legal moves "
         "should also be empty(i.e.,[]).\n"
         "When it's White's turn to move, if the position contains a Black piece, you should identify the piece, but "
         "its legal moves must be empty (and vice versa for Black's turn).\n"
         "You can think and reason as much as you want(step by step), but your final answer must be formatted "
         "exactly as shown above.";
}

std::vector<players::ChatMessage> basic_prompt(const BasicItem& item) {
  using Role = players::ChatMessage::Role;
  return {{Role::system, basic_system_prompt()},
          {Role::user, "Current board position in FEN notation:" + item.fen + "\nPosition:" + item.square.to_string()}};
}

namespace {

std::optional<nlohmann::json> last_json_object(std::string_view text) {
  // Scan closing braces from the end and try the matching opening brace.
  for (auto close = text.rfind('}'); close != std::string_view::npos; close = text.rfind('}', close - 1)) {
    int depth = 0;
    for (auto open = close + 1; open-- > 0;) {
      if (text[open] == '}') ++depth;
      if (text[open] == '{' && --depth == 0) {
        auto parsed = nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
        break;
      }
    }
    if (close == 0) break;
  }
  return std::nullopt;
}

std::string lower_trim(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace

std::optional<BasicAnswer> parse_basic_answer(std::string_view response) {
  const auto obj = last_json_object(response);
  if (!obj) return std::nullopt;
  BasicAnswer a;
  if (!obj->contains("piece")) return std::nullopt;
  const auto& piece = (*obj)["piece"];
  if (piece.is_string()) {
    std::string p = piece.get<std::string>();
    const std::string l = lower_trim(p);
    if (!(l.empty() || l == "none" || l == "empty" || l == "null")) {
      const auto b = p.find_first_not_of(" \t");
      a.piece = p.substr(b, p.find_last_not_of(" \t") - b + 1);
    }
  } else if (!piece.is_null()) {
    return std::nullopt;
  }
  const char* key = obj->contains("legal moves") ? "legal moves" : "legal_moves";
  if (!obj->contains(key)) return std::nullopt;
  const auto& moves = (*obj)[key];
  if (moves.is_null()) return a;
  if (!moves.is_array()) return std::nullopt;
  std::set<std::string> seen;
  for (const auto& m : moves) {
    if (!m.is_string()) return std::nullopt;
    auto s = lower_trim(m.get<std::string>());
    if (seen.insert(s).second) a.moves.push_back(std::move(s));
  }
  return a;
}

BasicRow score_basic_item(const BasicItem& item, std::string_view response) {
  BasicRow row;
  row.expected = static_cast<int>(item.legal.size());
  const auto answer = parse_basic_answer(response);
  if (!answer) {
    // Unparseable: wrong piece, every expected move missed, and one phantom
    // wrong prediction so it also counts against precision.
    row.predicted = 1;
    return row;
  }
  row.parsed = true;
  row.piece_match = item.piece ? answer->piece == std::string(1, item.piece->symbol()) : !answer->piece.has_value();
  row.predicted = static_cast<int>(answer->moves.size());
  for (const auto& m : item.legal) {
    if (std::find(answer->moves.begin(), answer->moves.end(), m.uci()) != answer->moves.end()) ++row.true_positive;
  }
  return row;
}

BasicScore aggregate_basic(std::vector<BasicRow> rows) {
  BasicScore s;
  int matches = 0;
  long tp = 0;
  long predicted = 0;
  long expected = 0;
  for (const auto& r : rows) {
    matches += r.piece_match;
    tp += r.true_positive;
    predicted += r.predicted;
    expected += r.expected;
  }
  s.pma = rows.empty() ? 0.0 : 100.0 * matches / static_cast<double>(rows.size());
  s.precision = predicted == 0 ? 100.0 : 100.0 * tp / static_cast<double>(predicted);
  s.recall = expected == 0 ? 100.0 : 100.0 * tp / static_cast<double>(expected);
  s.rows = std::move(rows);
  return s;
}

BasicScore score_basic_understanding(std::span<const BasicItem> items, std::span<const std::string> responses) {
  if (items.size() != responses.size()) throw std::invalid_argument("one response per item is required");
  std::vector<BasicRow> rows;
  for (std::size_t i = 0; i < items.size(); ++i) rows.push_back(score_basic_item(items[i], responses[i]));
  return aggregate_basic(std::move(rows));
}

}  // namespace chessarena::evals
