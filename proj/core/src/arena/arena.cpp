#include "chessarena/arena/arena.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "chessarena/arena/leaderboard.hpp"
#include "chessarena/util/fs.hpp"
#include "chessarena/util/rng.hpp"

namespace chessarena::arena {

namespace {

constexpr std::uint64_t kMatchTag = 0x6d61746368;  // "match"

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::vector<nlohmann::json> out;
  if (!std::filesystem::exists(path)) return out;
  std::istringstream in(util::read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception&) {
      spdlog::warn("skipping torn line in {}", path.string());
    }
  }
  return out;
}

nlohmann::ordered_json state_json(const rating::RatingState& s) {
  nlohmann::ordered_json j;
  j["r"] = s.r;
  j["rd"] = s.rd;
  j["games"] = s.games_played;
  return j;
}

}  // namespace

PlayerMaker default_player_maker(players::PlayerFactory factory) {
  return [factory = std::move(factory)](const players::PlayerSpec& self, const players::PlayerSpec&, chess::Color color,
                                        std::uint64_t game_seed) {
    return players::make_player(self, util::derive_seed(game_seed, color == chess::Color::white ? 1 : 2), factory);
  };
}

nlohmann::ordered_json round_to_json(const RoundRecord& r, const rating::Pool& after) {
  nlohmann::ordered_json j;
  j["round"] = r.round;
  j["initiator"] = r.initiator;
  j["opponent"] = r.opponent;
  j["pairing_score"] = r.pairing_score;
  j["games"] = r.games;
  j["initiator_points"] = r.initiator_points;
  j["aborted"] = r.aborted;
  nlohmann::ordered_json ratings;
  for (const auto* id : {&r.initiator, &r.opponent}) {
    if (const auto* e = rating::find_entry(std::span<const rating::PoolEntry>(after), *id)) {
      ratings[*id] = state_json(e->rating);
    }
  }
  j["ratings_after"] = ratings;
  return j;
}

rating::Pool initial_pool(const std::vector<players::PlayerSpec>& specs, const rating::RatingConfig& cfg) {
  rating::Pool pool;
  for (const auto& s : specs) {
    pool.push_back({s.id, rating::RatingState::fresh(cfg), true, std::string(players::to_string(s.mode)),
                    s.provide_legal_moves});
  }
  return pool;
}

std::filesystem::path pool_path(const std::filesystem::path& run_dir) { return run_dir / "pool.json"; }

Arena::Arena(ArenaContext ctx, rating::Pool pool, rating::RatingConfig cfg)
    : ctx_(std::move(ctx)), book_(std::move(pool), cfg) {
  if (!ctx_.make_player) throw std::invalid_argument("arena needs a player maker");
  if (ctx_.concurrency < 1) throw std::invalid_argument("concurrency must be at least 1");
  const auto& dir = ctx_.game.run_dir;
  if (dir.empty()) return;
  std::filesystem::create_directories(dir / "games");
  for (const auto& j : read_jsonl(dir / "ratings.jsonl")) {
    auto u = rating::update_from_json(j);
    stored_updates_.emplace(u.game_id, std::move(u));
  }
  for (const auto& j : read_jsonl(dir / "audit.jsonl")) stored_rounds_.insert(j.at("round").get<int>());
  if (!stored_updates_.empty()) {
    spdlog::info("resuming run in {}: {} rated games, {} rounds on record", dir.string(), stored_updates_.size(),
                 stored_rounds_.size());
  }
  book_.on_update([path = dir / "ratings.jsonl"](const rating::RatingUpdate& u) {
    util::append_line(path, rating::update_to_json(u).dump());
  });
}

const players::PlayerSpec& Arena::spec(const std::string& id) const {
  for (const auto& s : ctx_.players) {
    if (s.id == id) return s;
  }
  throw rating::pool_error("no player spec for id " + id);
}

GameRecord Arena::play_one(const std::string& white, const std::string& black, std::uint64_t seed, int index) {
  if (!ctx_.game.run_dir.empty()) {
    if (auto stored = load_game(ctx_.game.run_dir, game_id(white, black, seed, index)); stored && stored->finished()) {
      return *stored;
    }
  }
  const auto& ws = spec(white);
  const auto& bs = spec(black);
  auto wp = ctx_.make_player(ws, bs, chess::Color::white, seed);
  auto bp = ctx_.make_player(bs, ws, chess::Color::black, seed);
  return play_game(*wp, *bp, ctx_.game, seed, index);
}

void Arena::rate(const GameRecord& record) {
  if (auto it = stored_updates_.find(record.id); it != stored_updates_.end()) {
    const auto& u = it->second;
    if (book_.state_of(u.white) != u.white_before || book_.state_of(u.black) != u.black_before) {
      spdlog::warn("stored rating update for game {} was made from different ratings", record.id);
    }
    book_.replay(u);
    return;
  }
  book_.apply(record.id, record.white, record.black, rating::outcome_from_score(*record.white_score));
}

std::vector<GameRecord> Arena::run_match(const MatchRequest& req, std::uint64_t match_seed) {
  if (req.n_games <= 0 || req.n_games % 2 != 0) {
    throw std::invalid_argument("a match needs a positive even number of games, got " + std::to_string(req.n_games));
  }
  if (req.a == req.b) throw std::invalid_argument("a player cannot play itself: " + req.a);
  spec(req.a);
  spec(req.b);
  book_.state_of(req.a);
  book_.state_of(req.b);

  const int n = req.n_games;
  std::vector<std::optional<GameRecord>> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      const bool a_white = i % 2 == 0;
      try {
        results[i] = play_one(a_white ? req.a : req.b, a_white ? req.b : req.a, util::derive_seed(match_seed, i), i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int width = std::min(ctx_.concurrency, n);
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<GameRecord> out;
  for (auto& r : results) {
    if (!r) continue;
    if (r->finished()) rate(*r);
    out.push_back(std::move(*r));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<RoundRecord> Arena::run_tournament(const TournamentConfig& cfg) {
  if (ctx_.players.size() < 2) throw std::invalid_argument("a tournament needs at least two players");
  const double threshold = book_.config().display_rd_threshold;
  const std::uint64_t match_root = util::derive_seed(cfg.seed, kMatchTag);
  std::vector<RoundRecord> rounds;
  try {
    for (int round = 1; round <= cfg.rounds; ++round) {
      const rating::Pool pool = book_.snapshot();
      rating::Pool candidates;
      for (const auto& e : pool) {
        if (e.available && !(cfg.retire_reliable && e.rating.rd <= threshold)) candidates.push_back(e);
      }
      std::string initiator;
      if (const auto* named = std::get_if<rating::SpecifiedStartup>(&cfg.startup)) {
        if (!rating::find_entry(std::span<const rating::PoolEntry>(pool), named->id)) {
          throw rating::pool_error("unknown startup player " + named->id);
        }
        if (!rating::find_entry(std::span<const rating::PoolEntry>(candidates), named->id)) {
          spdlog::info("round {}: {} is reliable or unavailable, stopping", round, named->id);
          break;
        }
        initiator = named->id;
      } else {
        if (candidates.empty()) {
          spdlog::info("round {}: every player is reliable, stopping", round);
          break;
        }
        initiator = rating::select_initiator(candidates, rating::RandomStartup{util::derive_seed(cfg.seed, round)}).id;
      }
      const auto& me = *rating::find_entry(std::span<const rating::PoolEntry>(pool), initiator);
      const auto& opp = rating::sample_opponent(pool, me);

      RoundRecord rec;
      rec.round = round;
      rec.initiator = initiator;
      rec.opponent = opp.id;
      rec.pairing_score = rating::pairing_score(me.rating, opp.rating, book_.config().q);
      const auto games = run_match({initiator, opp.id, cfg.games_per_match}, util::derive_seed(match_root, round));
      for (const auto& g : games) {
        rec.games.push_back(g.id);
        if (auto s = g.score_of(initiator)) {
          rec.initiator_points += *s;
        } else {
          ++rec.aborted;
        }
      }
      spdlog::info("round {}: {} vs {} -> {}/{}", round, initiator, opp.id, rec.initiator_points, games.size());
      if (!ctx_.game.run_dir.empty() && !stored_rounds_.count(round)) {
        util::append_line(ctx_.game.run_dir / "audit.jsonl", round_to_json(rec, book_.snapshot()).dump());
        stored_rounds_.insert(round);
      }
      if (!ctx_.game.run_dir.empty()) write_artifacts();
      rounds.push_back(std::move(rec));
    }
  } catch (const interrupted&) {
    if (!ctx_.game.run_dir.empty()) write_artifacts();
    throw;
  }
  return rounds;
}

void Arena::write_artifacts() const {
  const auto& dir = ctx_.game.run_dir;
  if (dir.empty()) return;
  const auto pool = book_.snapshot();
  util::write_file_atomic(pool_path(dir), rating::pool_to_json(pool).dump(2) + "\n");
  const auto board = compute_leaderboard(pool, book_.config().display_rd_threshold);
  util::write_file_atomic(dir / "leaderboard.md", leaderboard_markdown(board));
  util::write_file_atomic(dir / "leaderboard.json", leaderboard_json(board).dump(2) + "\n");
}

}  // namespace chessarena::arena
