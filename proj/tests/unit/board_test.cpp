#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "chessarena/chess/board.hpp"
#include "chessarena/chess/notation.hpp"
#include "test_data.hpp"

namespace chessarena::chess {
namespace {

constexpr const char* kAppendixFen = "rnbqkbnr/pp2pppp/3p4/8/3pP3/5N2/PPP2PPP/RNBQKB1R w KQkq - 0 4";

std::vector<std::string> ucis(const std::vector<Move>& moves) {
  std::vector<std::string> out;
  for (const auto& m : moves) out.push_back(m.uci());
  return out;
}

TEST(FenTest, StartPositionRoundTrips) {
  const Board b = Board::parse_fen(kStartFen);
  EXPECT_EQ(b, Board::start());
  EXPECT_EQ(b.fen(), "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
  EXPECT_EQ(b.side_to_move(), Color::white);
  EXPECT_EQ(b.fullmove_number(), 1);
}

TEST(FenTest, AppendixPositionRoundTripsByteForByte) {
  const Board b = Board::parse_fen(kAppendixFen);
  EXPECT_EQ(b.fen(), kAppendixFen);
  EXPECT_EQ(b.side_to_move(), Color::white);
  EXPECT_EQ(b.fullmove_number(), 4);
}

TEST(FenTest, RejectsMalformedInput) {
  EXPECT_THROW(Board::parse_fen("8/8/8/8/8/8/8/8 w - - 0 1"), FenError);  // no kings
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq -"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/ppppXppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/ppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/pppppppp/9/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQxq - 0 1"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq e4 0 1"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR x KQkq - 0 1"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - -1 1"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 0"), FenError);
  EXPECT_THROW(Board::parse_fen("rnbqkbnP/pppppppp/8/8/8/8/PPPPPPP1/RNBQKBNR w KQkq - 0 1"), FenError);
  EXPECT_THROW(Board::parse_fen("4k3/8/8/8/8/8/8/4KK2 w - - 0 1"), FenError);
  // Black king attacked while white is to move.
  EXPECT_THROW(Board::parse_fen("4k3/8/8/8/8/8/8/4RK2 w - - 0 1"), FenError);
}

TEST(FenTest, DoublePushSetsEnPassantField) {
  const Board b = Board::start().apply(*parse_uci("e2e4"));
  EXPECT_EQ(b.fen(), "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
  EXPECT_EQ(b.side_to_move(), Color::black);
  EXPECT_EQ(b.en_passant()->to_string(), "e3");
  EXPECT_EQ(b.halfmove_clock(), 0);
}

TEST(MoveGenTest, StartPositionHasTwentyMovesInUciOrder) {
  const auto moves = ucis(Board::start().legal_moves());
  ASSERT_EQ(moves.size(), 20u);
  EXPECT_TRUE(std::is_sorted(moves.begin(), moves.end()));
}

TEST(MoveGenTest, AppendixPositionLegalSet) {
  const std::set<std::string> expected{
      "f3g5", "f3e5", "f3h4", "f3d4", "f3d2", "f3g1", "h1g1", "f1a6", "f1b5", "f1c4", "f1d3", "f1e2", "e1e2",
      "e1d2", "d1d4", "d1d3", "d1e2", "d1d2", "c1h6", "c1g5", "c1f4", "c1e3", "c1d2", "b1c3", "b1a3", "b1d2",
      "e4e5", "h2h3", "g2g3", "c2c3", "b2b3", "a2a3", "h2h4", "g2g4", "c2c4", "b2b4", "a2a4"};
  const auto moves = ucis(Board::parse_fen(kAppendixFen).legal_moves());
  EXPECT_EQ(moves.size(), 37u);
  EXPECT_EQ(std::set<std::string>(moves.begin(), moves.end()), expected);
}

TEST(MoveGenTest, CheckmatedPositionHasNoMoves) {
  // Fool's mate.
  const Board b = Board::parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3");
  EXPECT_TRUE(b.in_check());
  EXPECT_TRUE(b.legal_moves().empty());
}

TEST(MoveGenTest, SquareQueries) {
  const Board b = Board::start();
  const auto g1 = legal_moves_for_square(b, *Square::parse("g1"));
  ASSERT_TRUE(g1.piece);
  EXPECT_EQ(g1.piece->symbol(), 'N');
  const auto g1_moves = ucis(g1.moves);
  EXPECT_EQ(std::set<std::string>({"g1h3", "g1f3"}), std::set<std::string>(g1_moves.begin(), g1_moves.end()));

  const auto e4 = legal_moves_for_square(b, *Square::parse("e4"));
  EXPECT_FALSE(e4.piece);
  EXPECT_TRUE(e4.moves.empty());

  const auto e7 = legal_moves_for_square(b, *Square::parse("e7"));
  ASSERT_TRUE(e7.piece);
  EXPECT_EQ(e7.piece->symbol(), 'p');
  EXPECT_TRUE(e7.moves.empty());
}

TEST(ApplyTest, PromotionAndClockRules) {
  const Board b = Board::parse_fen("8/4P3/8/8/8/8/k7/4K3 w - - 12 40");
  const Board q = b.apply(*parse_uci("e7e8q"));
  EXPECT_EQ(q.at(*Square::parse("e8")), (Piece{PieceKind::queen, Color::white}));
  EXPECT_EQ(q.halfmove_clock(), 0);
  EXPECT_EQ(q.fullmove_number(), 40);

  const Board k = b.apply(*parse_uci("e1d1"));
  EXPECT_EQ(k.halfmove_clock(), 13);
  const Board k2 = k.apply(*parse_uci("a2b2"));
  EXPECT_EQ(k2.fullmove_number(), 41);
}

TEST(ApplyTest, RejectsIllegalMoves) {
  const Board b = Board::start();
  EXPECT_THROW(b.apply(*parse_uci("e2e5")), IllegalMoveError);
  EXPECT_THROW(b.apply(*parse_uci("e7e5")), IllegalMoveError);
  EXPECT_THROW(b.apply(*parse_uci("e1g1")), IllegalMoveError);
}

TEST(ApplyTest, CastlingAndEnPassant) {
  Board b = Board::parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1");
  const Board castled = b.apply(*parse_uci("e1g1"));
  EXPECT_EQ(castled.fen(), "r3k2r/8/8/8/8/8/8/R4RK1 b kq - 1 1");
  const Board long_castle = castled.apply(*parse_uci("e8c8"));
  EXPECT_EQ(long_castle.fen(), "2kr3r/8/8/8/8/8/8/R4RK1 w - - 2 2");

  Board ep = Board::parse_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 2");
  EXPECT_TRUE(ep.has_legal_en_passant());
  const Board taken = ep.apply(*parse_uci("e5d6"));
  EXPECT_EQ(taken.fen(), "4k3/8/3P4/8/8/8/8/4K3 b - - 0 2");
}

TEST(PerftTest, MatchesFrozenOracleCounts) {
  const auto oracle = testing::load_json("chess_oracle.json");
  for (const auto& [name, entry] : oracle["perft"].items()) {
    const Board b = Board::parse_fen(entry["fen"].get<std::string>());
    const auto& counts = entry["counts"];
    // Depth 4 of the large trees is left to the acceptance suite.
    const std::size_t max_depth = name == "kiwipete" ? 3 : counts.size();
    for (std::size_t d = 0; d < max_depth; ++d) {
      EXPECT_EQ(perft(b, static_cast<int>(d + 1)), counts[d].get<std::uint64_t>()) << name << " depth " << d + 1;
    }
  }
  EXPECT_EQ(perft(Board::start(), 0), 1u);
}

TEST(OracleCorpusTest, LegalMovesAndSuccessorsAgree) {
  const auto oracle = testing::load_json("chess_oracle.json");
  ASSERT_GT(oracle["positions"].size(), 100u);
  for (const auto& pos : oracle["positions"]) {
    const std::string fen = pos["fen"];
    const Board b = Board::parse_fen(fen);
    EXPECT_EQ(b.fen(), fen);
    const auto legal = b.legal_moves();
    EXPECT_EQ(ucis(legal), pos["legal"].get<std::vector<std::string>>()) << fen;
    for (const auto& mv : legal) {
      const std::string u = mv.uci();
      EXPECT_EQ(b.apply(mv).fen(), pos["after"][u].get<std::string>()) << fen << " " << u;
      EXPECT_EQ(move_to_san(b, mv), pos["san"][u].get<std::string>()) << fen << " " << u;
    }
  }
}

}  // namespace
}  // namespace chessarena::chess
