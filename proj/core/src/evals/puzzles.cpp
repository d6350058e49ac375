#include "chessarena/evals/puzzles.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "chessarena/chess/notation.hpp"
#include "chessarena/util/fs.hpp"

namespace chessarena::evals {

using chess::Board;

namespace {

constexpr int kBucketLow = 200;
constexpr int kBucketWidth = 400;
constexpr int kBucketCount = 7;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::vector<std::string> split_spaces(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

PuzzleLoad parse_lichess_puzzles(const std::string& csv, const PuzzleFilter& filter) {
  std::istringstream in(csv);
  std::string header_line;
  if (!std::getline(in, header_line) || header_line.find_first_not_of(" \r\n") == std::string::npos) {
    throw puzzle_error("puzzle file is empty");
  }
  const auto header = split_csv_line(header_line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw puzzle_error("puzzle file lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_id = column("PuzzleId");
  const auto c_fen = column("FEN");
  const auto c_moves = column("Moves");
  const auto c_rating = column("Rating");
  const auto c_themes = column("Themes");
  for (const char* other : {"RatingDeviation", "Popularity", "NbPlays", "GameUrl"}) column(other);

  PuzzleLoad out;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    try {
      if (f.size() < header.size() - 1) throw std::invalid_argument("short row");
      Puzzle p;
      p.id = f.at(c_id);
      p.rating = std::stoi(f.at(c_rating));
      if (p.rating < filter.min_rating || p.rating > filter.max_rating) continue;
      Board board = Board::parse_fen(f.at(c_fen));
      p.fen = board.fen();
      for (const auto& tok : split_spaces(f.at(c_moves))) {
        const auto mv = chess::parse_uci(tok);
        if (!mv) throw std::invalid_argument("bad move " + tok);
        board = board.apply(*mv);
        p.moves.push_back(*mv);
      }
      if (p.moves.size() < 2) throw std::invalid_argument("no solver move");
      if (c_themes < f.size()) p.themes = split_spaces(f[c_themes]);
      out.puzzles.push_back(std::move(p));
      if (filter.max_count != 0 && out.puzzles.size() >= filter.max_count) break;
    } catch (const std::exception& e) {
      ++out.skipped;
      spdlog::debug("skipping puzzle row: {}", e.what());
    }
  }
  if (out.skipped > 0) spdlog::warn("skipped {} invalid puzzle rows", out.skipped);
  return out;
}

PuzzleLoad load_lichess_puzzles(const std::filesystem::path& path, const PuzzleFilter& filter) {
  if (!std::filesystem::exists(path)) throw puzzle_error("puzzle file not found: " + path.string());
  return parse_lichess_puzzles(util::read_file(path), filter);
}

PuzzleOutcome run_puzzle(players::Player& player, const Puzzle& puzzle) {
  PuzzleOutcome out;
  out.id = puzzle.id;
  out.rating = puzzle.rating;
  Board board = Board::parse_fen(puzzle.fen).apply(puzzle.moves[0]);
  for (std::size_t i = 1; i < puzzle.moves.size(); i += 2) {
    players::PromptContext ctx;
    ctx.start = board;
    ctx.board = board;
    const auto decision = player.request_move(ctx);
    if (decision.move != puzzle.moves[i]) {
      out.wrong_move = decision.move;
      return out;
    }
    ++out.solver_moves;
    board = board.apply(puzzle.moves[i]);
    if (i + 1 < puzzle.moves.size()) board = board.apply(puzzle.moves[i + 1]);
  }
  out.solved = true;
  return out;
}

std::optional<int> bucket_index(int rating) {
  if (rating < kBucketLow || rating > kBucketLow + kBucketWidth * kBucketCount) return std::nullopt;
  return std::min((rating - kBucketLow) / kBucketWidth, kBucketCount - 1);
}

PsaReport psa_report(std::span<const PuzzleOutcome> outcomes) {
  PsaReport r;
  std::vector<Bucket> all(kBucketCount);
  for (int i = 0; i < kBucketCount; ++i) {
    all[i].lo = kBucketLow + i * kBucketWidth;
    all[i].hi = all[i].lo + kBucketWidth;
  }
  for (const auto& o : outcomes) {
    ++r.total;
    r.solved += o.solved;
    if (auto b = bucket_index(o.rating)) {
      ++all[*b].total;
      all[*b].solved += o.solved;
    }
  }
  for (const auto& b : all) {
    if (b.total > 0) r.buckets.push_back(b);
  }
  return r;
}

nlohmann::ordered_json puzzle_outcome_to_json(const PuzzleOutcome& o) {
  nlohmann::ordered_json j;
  j["id"] = o.id;
  j["rating"] = o.rating;
  j["solved"] = o.solved;
  j["solver_moves"] = o.solver_moves;
  if (!o.solved) j["wrong_move"] = o.wrong_move ? nlohmann::ordered_json(o.wrong_move->uci()) : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json psa_to_json(const PsaReport& r) {
  nlohmann::ordered_json j;
  j["total"] = r.total;
  j["solved"] = r.solved;
  j["psa"] = r.overall();
  j["buckets"] = nlohmann::ordered_json::array();
  for (const auto& b : r.buckets) {
    j["buckets"].push_back({{"range", fmt::format("{}-{}", b.lo, b.hi)}, {"total", b.total}, {"solved", b.solved},
                            {"psa", b.psa()}});
  }
  return j;
}

std::string psa_markdown(const PsaReport& r) {
  std::string head = "|";
  std::string rule = "|";
  std::string row = "|";
  for (const auto& b : r.buckets) {
    head += fmt::format(" {}-{} |", b.lo, b.hi);
    rule += "---:|";
    row += fmt::format(" {:.1f} |", b.psa());
  }
  head += " Overall |\n";
  rule += "---:|\n";
  row += fmt::format(" {:.1f} |\n", r.overall());
  return head + rule + row;
}

}  // namespace chessarena::evals
