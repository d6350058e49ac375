#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "chessarena/chess/board.hpp"
#include "chessarena/chess/notation.hpp"
#include "chessarena/engine/uci.hpp"
#include "engine_config.hpp"
#include "test_data.hpp"

using namespace chessarena::engine;
using chessarena::chess::Board;
using chessarena::chess::Move;
using namespace std::chrono_literals;

namespace {

Move uci(std::string_view s) { return *chessarena::chess::parse_uci(s); }

EngineOptions quick() {
  EngineOptions o;
  o.handshake_timeout = 3s;
  o.search_timeout = 3s;
  return o;
}

std::filesystem::path temp_path(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("chessarena_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove(p);
  return p;
}

// Colour-flipped mirror: ranks reversed, piece colours swapped, side flipped.
std::string mirror_fen(const std::string& fen) {
  std::istringstream in(fen);
  std::string placement, side, castling, ep, half, full;
  in >> placement >> side >> castling >> ep >> half >> full;
  std::vector<std::string> ranks;
  std::stringstream ps(placement);
  for (std::string r; std::getline(ps, r, '/');) ranks.push_back(r);
  std::string out;
  for (auto it = ranks.rbegin(); it != ranks.rend(); ++it) {
    if (!out.empty()) out += '/';
    for (char c : *it) out += std::isalpha(static_cast<unsigned char>(c)) ? (std::isupper(c) ? std::tolower(c) : std::toupper(c)) : c;
  }
  std::string cast;
  for (char c : castling) cast += c == '-' ? c : (std::isupper(c) ? std::tolower(c) : std::toupper(c));
  std::sort(cast.begin(), cast.end(), [](char a, char b) {
    auto rank = [](char c) { return std::string_view("KQkq-").find(c); };
    return rank(a) < rank(b);
  });
  if (ep != "-") ep[1] = ep[1] == '3' ? '6' : '3';
  return out + " " + (side == "w" ? "b" : "w") + " " + cast + " " + ep + " " + half + " " + full;
}

Move mirror_move(const Move& m) {
  return Move{chessarena::chess::Square(m.from.file, 7 - m.from.rank), chessarena::chess::Square(m.to.file, 7 - m.to.rank),
              m.promotion};
}

}  // namespace

TEST(WinRate, Mapping) {
  EXPECT_DOUBLE_EQ(win_rate_from_score(Score::centipawns(0)), 0.5);
  EXPECT_NEAR(win_rate_from_score(Score::centipawns(400)), 10.0 / 11.0, 1e-12);
  EXPECT_NEAR(win_rate_from_score(Score::mate_in(1)), 0.999, 1e-12);
  EXPECT_NEAR(win_rate_from_score(Score::mate_in(-1)), 0.001, 1e-12);
  EXPECT_DOUBLE_EQ(win_rate_from_score(Score::mate_in(200)), 0.95);
  EXPECT_DOUBLE_EQ(win_rate_from_score(Score::mate_in(-200)), 0.05);
  for (int c = -3000; c <= 3000; c += 7) {
    EXPECT_LT(win_rate_from_score(Score::centipawns(c)), win_rate_from_score(Score::centipawns(c + 1)));
    EXPECT_NEAR(win_rate_from_score(Score::centipawns(c)) + win_rate_from_score(Score::centipawns(-c)), 1.0, 1e-12);
  }
  for (int n = 1; n < 49; ++n) {
    EXPECT_GT(win_rate_from_score(Score::mate_in(n)), win_rate_from_score(Score::mate_in(n + 1)));
    EXPECT_LT(win_rate_from_score(Score::mate_in(-n)), win_rate_from_score(Score::mate_in(-n - 1)));
  }
  // Across kinds the mapping stays ordered for ordinary evaluations.
  for (int c = -500; c <= 500; c += 10) {
    EXPECT_GT(win_rate_from_score(Score::mate_in(30)), win_rate_from_score(Score::centipawns(c)));
    EXPECT_LT(win_rate_from_score(Score::mate_in(-30)), win_rate_from_score(Score::centipawns(c)));
  }
}

TEST(WinRate, ScoreOrder) {
  EXPECT_TRUE(score_less(Score::centipawns(5000), Score::mate_in(40)));
  EXPECT_TRUE(score_less(Score::mate_in(3), Score::mate_in(1)));
  EXPECT_TRUE(score_less(Score::mate_in(-1), Score::mate_in(-4)));
  EXPECT_TRUE(score_less(Score::mate_in(-9), Score::centipawns(-5000)));
  EXPECT_FALSE(score_less(Score::centipawns(3), Score::centipawns(3)));
}

TEST(Analysis, TopMovesRanking) {
  std::vector<MoveEval> evals{
      {uci("a2a3"), Score::centipawns(10), win_rate_from_score(Score::centipawns(10))},
      {uci("b2b3"), Score::centipawns(50), win_rate_from_score(Score::centipawns(50))},
      {uci("c2c3"), Score::centipawns(50), win_rate_from_score(Score::centipawns(50))},
      {uci("d2d4"), Score::mate_in(2), win_rate_from_score(Score::mate_in(2))},
  };
  const std::vector<Move> expected{uci("d2d4"), uci("b2b3"), uci("c2c3")};
  EXPECT_EQ(compute_top_moves(evals), expected);
  EXPECT_EQ(compute_top_moves({evals[0]}), std::vector<Move>{uci("a2a3")});
}

TEST(Analysis, JsonRoundTrip) {
  AnalysisTable t{"Eng", std::string(chessarena::chess::kStartFen), 5,
                  {{uci("e2e4"), Score::centipawns(30), win_rate_from_score(Score::centipawns(30))},
                   {uci("f2f3"), Score::mate_in(-3), win_rate_from_score(Score::mate_in(-3))}},
                  {uci("e2e4"), uci("f2f3")}};
  const auto back = table_from_json(nlohmann::json::parse(table_to_json(t).dump()));
  EXPECT_EQ(table_to_json(back).dump(), table_to_json(t).dump());
  EXPECT_EQ(back.find(uci("f2f3"))->score, Score::mate_in(-3));
  EXPECT_EQ(back.find(uci("a2a3")), nullptr);
}

TEST(Subprocess, SplitsCommands) {
  EXPECT_EQ(split_command("node  'a b/c.js' --x \"y z\""), (std::vector<std::string>{"node", "a b/c.js", "--x", "y z"}));
  EXPECT_THROW(split_command("node 'oops"), engine_error);
}

TEST(Subprocess, SpawnFailure) {
  try {
    Subprocess p({"/nonexistent/engine-binary"});
    FAIL() << "expected spawn failure";
  } catch (const engine_error& e) {
    EXPECT_EQ(e.kind(), engine_error::Kind::spawn);
  }
}

TEST(FakeEngine, HandshakeAndOptions) {
  EngineOptions opts = quick();
  opts.extra = {{"Definitely Not An Option", "1"}};
  auto eng = UciEngine::start(chessarena::testing::fake_engine(), opts);
  EXPECT_EQ(eng.name(), "FakeUCI 1.0");
  EXPECT_TRUE(eng.advertised_options().contains("MultiPV"));
}

TEST(FakeEngine, AnalysisCoversLegalMoves) {
  auto eng = UciEngine::start(chessarena::testing::fake_engine(), quick());
  const auto table = eng.analyze_all_moves(std::string(chessarena::chess::kStartFen), 3);
  EXPECT_EQ(table.evals.size(), 20u);
  EXPECT_EQ(table.top_moves.size(), 3u);
  const auto legal = Board::start().legal_moves();
  for (std::size_t i = 0; i < legal.size(); ++i) EXPECT_EQ(table.evals[i].move, legal[i]);
  for (const auto& e : table.evals) {
    EXPECT_GE(e.win_rate, 0.0);
    EXPECT_LE(e.win_rate, 1.0);
    EXPECT_FALSE(table.top_moves.empty());
    EXPECT_LE(e.win_rate, table.find(table.top_moves.front())->win_rate);
  }
  // Single legal move.
  const auto forced = eng.analyze_all_moves("k7/8/8/8/8/8/1q6/K7 w - - 0 1", 2);
  ASSERT_EQ(forced.evals.size(), 1u);
  EXPECT_EQ(forced.top_moves, std::vector<Move>{uci("a1b2")});
  // Terminal position needs no engine call.
  EXPECT_TRUE(eng.analyze_all_moves("7k/6Q1/6K1/8/8/8/8/8 b - - 0 1", 2).evals.empty());
}

TEST(FakeEngine, BestMove) {
  auto eng = UciEngine::start(chessarena::testing::fake_engine(), quick());
  EXPECT_EQ(eng.best_move("6k1/5ppp/8/8/8/8/5PPP/R5K1 w - - 0 1", {.depth = 1}), uci("a1a8"));
  EXPECT_TRUE(Board::start().is_legal(eng.best_move(std::string(chessarena::chess::kStartFen), {.nodes = 1})));
}

TEST(FakeEngine, Failures) {
  auto kind_of = [](const std::string& mode, auto&& fn) {
    try {
      auto eng = UciEngine::start(chessarena::testing::fake_engine(mode), quick());
      fn(eng);
    } catch (const engine_error& e) {
      return e.kind();
    }
    ADD_FAILURE() << mode << " did not fail";
    return engine_error::Kind::spawn;
  };
  const std::string start(chessarena::chess::kStartFen);
  auto best = [&](UciEngine& e) { e.best_move(start, {.depth = 2}); };
  auto analyze = [&](UciEngine& e) { e.analyze_all_moves(start, 2); };
  EXPECT_EQ(kind_of("mute", best), engine_error::Kind::handshake_timeout);
  EXPECT_EQ(kind_of("crash", best), engine_error::Kind::crashed);
  EXPECT_EQ(kind_of("hang", best), engine_error::Kind::timeout);
  EXPECT_EQ(kind_of("illegal", best), engine_error::Kind::protocol);
  EXPECT_EQ(kind_of("none", best), engine_error::Kind::protocol);
  EXPECT_EQ(kind_of("truncate", analyze), engine_error::Kind::protocol);
}

TEST(FakeEngine, MirrorPerspective) {
  auto eng = UciEngine::start(chessarena::testing::fake_engine(), quick());
  const auto oracle = chessarena::testing::load_json("chess_oracle.json");
  int checked = 0;
  for (const auto& pos : oracle["positions"]) {
    const std::string fen = pos["fen"].get<std::string>();
    const auto t = eng.analyze_all_moves(fen, 1);
    const auto m = eng.analyze_all_moves(mirror_fen(fen), 1);
    ASSERT_EQ(t.evals.size(), m.evals.size()) << fen;
    for (const auto& e : t.evals) {
      const auto* other = m.find(mirror_move(e.move));
      ASSERT_NE(other, nullptr) << fen;
      EXPECT_DOUBLE_EQ(other->win_rate, e.win_rate);
    }
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(AnalysisCache, PersistsAndReloads) {
  const auto path = temp_path("cache.jsonl");
  auto eng = UciEngine::start(chessarena::testing::fake_engine(), quick());
  {
    AnalysisCache cache(path);
    const auto t1 = analyze_cached(eng, cache, std::string(chessarena::chess::kStartFen), 2);
    const auto t2 = analyze_cached(eng, cache, std::string(chessarena::chess::kStartFen), 2);
    EXPECT_EQ(table_to_json(t1).dump(), table_to_json(t2).dump());
    EXPECT_EQ(cache.size(), 1u);
  }
  AnalysisCache reloaded(path);
  EXPECT_EQ(reloaded.size(), 1u);
  EXPECT_TRUE(reloaded.get("FakeUCI 1.0", std::string(chessarena::chess::kStartFen), 2).has_value());
  EXPECT_FALSE(reloaded.get("Other", std::string(chessarena::chess::kStartFen), 2).has_value());
  EXPECT_TRUE(reloaded.get_any(std::string(chessarena::chess::kStartFen), 2).has_value());
  std::filesystem::remove(path);
}

class RealEngine : public ::testing::Test {
 protected:
  void SetUp() override {
    cmd_ = chessarena::testing::engine_command();
    if (!cmd_) GTEST_SKIP() << "no UCI engine configured (set CHESSARENA_ENGINE or run tools/fetch_engine.sh)";
  }
  std::optional<std::string> cmd_;
};

TEST_F(RealEngine, HandshakeAndBestMove) {
  EngineOptions opts;
  opts.extra = {{"No Such Option", "1"}};
  auto eng = UciEngine::start(*cmd_, opts);
  EXPECT_FALSE(eng.name().empty());
  EXPECT_EQ(eng.best_move("6k1/5ppp/8/8/8/8/5PPP/R5K1 w - - 0 1", {.depth = 6}), uci("a1a8"));
  EXPECT_TRUE(Board::start().is_legal(eng.best_move(std::string(chessarena::chess::kStartFen), {.depth = 1})));
  EXPECT_TRUE(Board::start().is_legal(eng.best_move(std::string(chessarena::chess::kStartFen), {.nodes = 1})));
}

TEST_F(RealEngine, StartPositionStructure) {
  auto eng = UciEngine::start(*cmd_);
  const auto t = eng.analyze_all_moves(std::string(chessarena::chess::kStartFen), 10);
  EXPECT_EQ(t.evals.size(), 20u);
  EXPECT_EQ(t.top_moves.size(), 3u);
  const auto again = eng.analyze_all_moves(std::string(chessarena::chess::kStartFen), 10);
  EXPECT_EQ(table_to_json(t).dump(), table_to_json(again).dump());
}

TEST_F(RealEngine, CoverageAndPerspective) {
  auto eng = UciEngine::start(*cmd_);
  const auto oracle = chessarena::testing::load_json("chess_oracle.json");
  int checked = 0;
  for (const auto& pos : oracle["positions"]) {
    if (checked == 20) break;
    const std::string fen = pos["fen"].get<std::string>();
    if (pos["legal"].empty()) continue;
    const auto t = eng.analyze_all_moves(fen, 12);
    ASSERT_EQ(t.evals.size(), pos["legal"].size()) << fen;
    const auto m = eng.analyze_all_moves(mirror_fen(fen), 12);
    ASSERT_EQ(m.evals.size(), t.evals.size()) << mirror_fen(fen);
    const auto best = t.top_moves.front();
    const auto* mirrored = m.find(mirror_move(best));
    ASSERT_NE(mirrored, nullptr);
    const auto white_view = [](const std::string& f, double q) {
      return Board::parse_fen(f).side_to_move() == chessarena::chess::Color::white ? q : 1.0 - q;
    };
    EXPECT_NEAR(white_view(mirror_fen(fen), mirrored->win_rate), 1.0 - white_view(fen, t.find(best)->win_rate), 0.02)
        << fen;
    ++checked;
  }
  EXPECT_EQ(checked, 20);
}
