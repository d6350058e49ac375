#include "chessarena/arena/game.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "chessarena/chess/notation.hpp"
#include "chessarena/util/fs.hpp"
#include "chessarena/util/hash.hpp"

namespace chessarena::arena {

using chess::Board;
using chess::Color;
using chess::Termination;
using chess::TerminationReason;

namespace {

std::string side_name(Color c) { return c == Color::white ? "white" : "black"; }

Color color_from_name(const std::string& s) {
  if (s == "white") return Color::white;
  if (s == "black") return Color::black;
  throw std::invalid_argument("bad colour '" + s + "'");
}

double white_score_of(const Termination& t) {
  if (!t.winner) return 0.5;
  return *t.winner == Color::white ? 1.0 : 0.0;
}

chess::Move parse_move_field(const nlohmann::json& j) {
  const auto mv = chess::parse_uci(j.get<std::string>());
  if (!mv) throw std::invalid_argument("bad move in game record");
  return *mv;
}

}  // namespace

std::vector<chess::Move> GameRecord::moves() const {
  std::vector<chess::Move> out;
  for (const auto& p : plies) {
    if (p.move) out.push_back(*p.move);
  }
  return out;
}

std::optional<double> GameRecord::score_of(const std::string& player) const {
  if (!white_score) return std::nullopt;
  if (player == white) return *white_score;
  if (player == black) return 1.0 - *white_score;
  return std::nullopt;
}

std::string game_id(const std::string& white, const std::string& black, std::uint64_t seed, int index) {
  return util::digest(fmt::format("{}\n{}\n{}\n{}", white, black, seed, index));
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

GameRecord play_game(players::Player& white, players::Player& black, const GameConfig& cfg, std::uint64_t seed,
                     int index) {
  if (white.spec().id == black.spec().id) throw std::invalid_argument("a player cannot play itself");
  const auto now = cfg.clock ? cfg.clock : utc_now;

  GameRecord rec;
  rec.white = white.spec().id;
  rec.black = black.spec().id;
  rec.seed = seed;
  rec.index = index;
  rec.id = game_id(rec.white, rec.black, seed, index);
  rec.started_at = now();

  players::PromptContext ctx;
  chess::PositionHistory history(ctx.board);
  try {
    while (true) {
      if (cfg.stop && cfg.stop->load()) throw interrupted("game " + rec.id + " interrupted");
      if (auto status = chess::game_status(ctx.board, history, cfg.ply_cap)) {
        rec.termination = *status;
        break;
      }
      const Color mover = ctx.board.side_to_move();
      players::Player& p = mover == Color::white ? white : black;
      PlyRecord ply;
      ply.ply = static_cast<int>(rec.plies.size()) + 1;
      ply.color = mover;
      ply.player = p.spec().id;
      ply.fen_before = ctx.board.fen();
      auto decision = p.request_move(ctx);
      ply.prompt_digest = std::move(decision.prompt_digest);
      ply.attempts = std::move(decision.attempts);
      ply.move = decision.move;
      rec.plies.push_back(std::move(ply));
      if (!decision.move) {
        rec.termination = Termination{TerminationReason::forfeit, chess::opposite(mover)};
        break;
      }
      ctx.board = ctx.board.apply(*decision.move);
      ctx.moves.push_back(*decision.move);
      history.push(ctx.board);
    }
    rec.white_score = white_score_of(*rec.termination);
  } catch (const players::game_aborted& e) {
    rec.aborted = true;
    rec.abort_reason = e.what();
    spdlog::warn("game {} aborted: {}", rec.id, e.what());
  }
  if (cfg.annotator && !rec.aborted) annotate_game(rec, cfg.annotator);
  rec.finished_at = now();
  if (!cfg.run_dir.empty()) save_game(cfg.run_dir, rec);
  return rec;
}

void annotate_game(GameRecord& record, const Annotator& annotator) {
  for (auto& ply : record.plies) {
    if (!ply.move) continue;
    const auto table = annotator(ply.fen_before);
    const auto* eval = table.find(*ply.move);
    if (!eval) throw std::runtime_error("analysis of " + ply.fen_before + " lacks " + ply.move->uci());
    ply.q = eval->win_rate;
    ply.in_top3 = table.is_top(*ply.move);
  }
}

std::string game_to_jsonl(const GameRecord& r) {
  std::string out;
  nlohmann::ordered_json header;
  header["type"] = "header";
  header["id"] = r.id;
  header["white"] = r.white;
  header["black"] = r.black;
  header["seed"] = r.seed;
  header["index"] = r.index;
  header["started_at"] = r.started_at;
  out += header.dump() + "\n";
  for (const auto& p : r.plies) {
    nlohmann::ordered_json j;
    j["type"] = "ply";
    j["ply"] = p.ply;
    j["color"] = side_name(p.color);
    j["player"] = p.player;
    j["fen"] = p.fen_before;
    j["prompt_digest"] = p.prompt_digest;
    j["move"] = p.move ? nlohmann::ordered_json(p.move->uci()) : nlohmann::ordered_json(nullptr);
    if (p.q) j["q"] = *p.q;
    if (p.in_top3) j["top3"] = *p.in_top3;
    j["attempts"] = nlohmann::ordered_json::array();
    for (const auto& a : p.attempts) j["attempts"].push_back(players::attempt_to_json(a));
    out += j.dump() + "\n";
  }
  nlohmann::ordered_json footer;
  footer["type"] = "footer";
  footer["status"] = r.aborted ? "aborted" : "finished";
  if (r.termination) {
    footer["termination"] = chess::to_string(r.termination->reason);
    footer["winner"] = r.termination->winner ? nlohmann::ordered_json(side_name(*r.termination->winner))
                                             : nlohmann::ordered_json(nullptr);
    footer["white_score"] = *r.white_score;
  }
  if (r.aborted) footer["abort_reason"] = r.abort_reason;
  footer["plies"] = r.plies.size();
  footer["finished_at"] = r.finished_at;
  out += footer.dump() + "\n";
  return out;
}

GameRecord game_from_jsonl(const std::string& text) {
  GameRecord r;
  std::istringstream in(text);
  bool have_header = false;
  bool have_footer = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      r.id = j.at("id").get<std::string>();
      r.white = j.at("white").get<std::string>();
      r.black = j.at("black").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.index = j.at("index").get<int>();
      r.started_at = j.value("started_at", "");
      have_header = true;
    } else if (type == "ply") {
      PlyRecord p;
      p.ply = j.at("ply").get<int>();
      p.color = color_from_name(j.at("color").get<std::string>());
      p.player = j.at("player").get<std::string>();
      p.fen_before = j.at("fen").get<std::string>();
      p.prompt_digest = j.value("prompt_digest", "");
      if (!j.at("move").is_null()) p.move = parse_move_field(j["move"]);
      if (j.contains("q")) p.q = j["q"].get<double>();
      if (j.contains("top3")) p.in_top3 = j["top3"].get<bool>();
      for (const auto& a : j.at("attempts")) p.attempts.push_back(players::attempt_from_json(a));
      r.plies.push_back(std::move(p));
    } else if (type == "footer") {
      r.aborted = j.at("status").get<std::string>() == "aborted";
      if (j.contains("termination")) {
        const auto reason = chess::termination_from_string(j["termination"].get<std::string>());
        if (!reason) throw std::invalid_argument("bad termination in game record");
        Termination t{*reason, std::nullopt};
        if (!j.at("winner").is_null()) t.winner = color_from_name(j["winner"].get<std::string>());
        r.termination = t;
        r.white_score = j.at("white_score").get<double>();
      }
      r.abort_reason = j.value("abort_reason", "");
      r.finished_at = j.value("finished_at", "");
      have_footer = true;
    } else {
      throw std::invalid_argument("unknown record type '" + type + "'");
    }
  }
  if (!have_header || !have_footer) throw std::invalid_argument("game record is incomplete");
  return r;
}

std::filesystem::path game_path(const std::filesystem::path& run_dir, const std::string& id) {
  return run_dir / "games" / (id + ".jsonl");
}

void save_game(const std::filesystem::path& run_dir, const GameRecord& record) {
  util::write_file_atomic(game_path(run_dir, record.id), game_to_jsonl(record));
}

std::optional<GameRecord> load_game(const std::filesystem::path& run_dir, const std::string& id) {
  const auto path = game_path(run_dir, id);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    return game_from_jsonl(util::read_file(path));
  } catch (const std::exception& e) {
    spdlog::warn("ignoring unreadable game record {}: {}", path.string(), e.what());
    return std::nullopt;
  }
}

std::optional<std::string> verify_replay(const GameRecord& record, int ply_cap) {
  Board board = Board::start();
  chess::PositionHistory history(board);
  for (const auto& p : record.plies) {
    if (p.fen_before != board.fen()) {
      return fmt::format("ply {}: stored fen {} but replay gives {}", p.ply, p.fen_before, board.fen());
    }
    if (p.color != board.side_to_move()) return fmt::format("ply {}: wrong colour", p.ply);
    if (chess::game_status(board, history, ply_cap)) return fmt::format("ply {}: game was already over", p.ply);
    if (!p.move) {
      if (&p != &record.plies.back()) return fmt::format("ply {}: forfeit before the last ply", p.ply);
      const Termination expected{TerminationReason::forfeit, chess::opposite(p.color)};
      if (record.termination != expected) return std::string("forfeit not recorded as termination");
      break;
    }
    if (!board.is_legal(*p.move)) return fmt::format("ply {}: illegal move {}", p.ply, p.move->uci());
    board = board.apply(*p.move);
    history.push(board);
  }
  if (record.aborted) return std::nullopt;
  if (!record.termination) return std::string("finished game has no termination");
  if (record.termination->reason != TerminationReason::forfeit) {
    const auto status = chess::game_status(board, history, ply_cap);
    if (status != record.termination) return std::string("termination does not match the final position");
  }
  if (record.white_score != white_score_of(*record.termination)) return std::string("score inconsistent with result");
  return std::nullopt;
}

}  // namespace chessarena::arena
