// Scripted UCI engine for protocol tests. argv[1] selects a behaviour:
// normal, crash, hang, illegal, none, mute, truncate.
#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "chessarena/chess/board.hpp"
#include "chessarena/util/hash.hpp"

using chessarena::chess::Board;
using chessarena::chess::Move;

namespace {

struct Scored {
  Move move;
  bool mate;
  int value;
};

Move mirrored(const Move& m) {
  using chessarena::chess::Square;
  return Move{Square(m.from.file, 7 - m.from.rank), Square(m.to.file, 7 - m.to.rank), m.promotion};
}

std::vector<Scored> score_all(const Board& b) {
  std::vector<Scored> out;
  for (const auto& m : b.legal_moves()) {
    const Board next = b.apply(m);
    if (next.in_check() && next.legal_moves().empty()) {
      out.push_back({m, true, 1});
    } else {
      // Keyed on the move as seen by the mover so colour-mirrored positions score alike.
      const Move seen = b.side_to_move() == chessarena::chess::Color::white ? m : mirrored(m);
      out.push_back({m, false, static_cast<int>(chessarena::util::fnv1a64(seen.uci()) % 201) - 100});
    }
  }
  std::sort(out.begin(), out.end(), [](const Scored& a, const Scored& c) {
    if (a.mate != c.mate) return a.mate;
    if (a.value != c.value) return a.value > c.value;
    return a.move.uci() < c.move.uci();
  });
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "normal";
  Board board = Board::start();
  int multipv = 1;
  std::string line;
  while (std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    if (cmd == "uci") {
      std::cout << "id name FakeUCI 1.0\nid author tests\n";
      std::cout << "option name Threads type spin default 1 min 1 max 8\n";
      std::cout << "option name Hash type spin default 16 min 1 max 1024\n";
      std::cout << "option name MultiPV type spin default 1 min 1 max 500\n";
      if (mode != "mute") std::cout << "uciok\n";
    } else if (cmd == "isready") {
      std::cout << "readyok\n";
    } else if (cmd == "setoption") {
      std::string word, name, value;
      in >> word >> name >> word >> value;
      if (name == "MultiPV") multipv = std::stoi(value);
    } else if (cmd == "position") {
      std::string word;
      in >> word;
      if (word == "startpos") {
        board = Board::start();
      } else {
        std::string rest;
        std::getline(in, rest);
        board = Board::parse_fen(rest.substr(1));
      }
    } else if (cmd == "go") {
      if (mode == "crash") return 3;
      if (mode == "hang") continue;
      std::string word;
      int depth = 1;
      while (in >> word) {
        if (word == "depth") in >> depth;
      }
      const auto scored = score_all(board);
      const int width = std::min<int>(multipv, static_cast<int>(scored.size()));
      for (int d = 1; d <= depth; ++d) {
        std::cout << "info string searching depth " << d << "\n";
        if (!scored.empty()) {
          std::cout << "info depth " << d << " multipv 1 score cp 9999 lowerbound pv " << scored.back().move.uci() << "\n";
        }
        const int shown = mode == "truncate" ? width - 1 : width;
        for (int k = 0; k < shown; ++k) {
          const auto& s = scored[k];
          std::cout << "info depth " << d << " seldepth " << d + 2 << " multipv " << k + 1 << " score "
                    << (s.mate ? "mate " : "cp ") << s.value << " nodes 100 pv " << s.move.uci() << " a1a2\n";
        }
      }
      if (mode == "none" || scored.empty()) {
        std::cout << "bestmove (none)\n";
      } else if (mode == "illegal") {
        std::cout << "bestmove e2e5\n";
      } else {
        std::cout << "bestmove " << scored.front().move.uci() << "\n";
      }
    } else if (cmd == "quit") {
      break;
    }
    std::cout.flush();
  }
  return 0;
}
