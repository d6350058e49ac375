#include "chessarena/rating/pool.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "chessarena/util/rng.hpp"

namespace chessarena::rating {

void validate_pool(std::span<const PoolEntry> pool) {
  std::set<std::string_view> seen;
  for (const auto& e : pool) {
    if (e.id.empty()) throw pool_error("pool entry with empty id");
    if (!seen.insert(e.id).second) throw pool_error("duplicate pool id: " + e.id);
  }
}

const PoolEntry* find_entry(std::span<const PoolEntry> pool, std::string_view id) {
  auto it = std::find_if(pool.begin(), pool.end(), [&](const PoolEntry& e) { return e.id == id; });
  return it == pool.end() ? nullptr : &*it;
}

PoolEntry* find_entry(std::span<PoolEntry> pool, std::string_view id) {
  auto it = std::find_if(pool.begin(), pool.end(), [&](const PoolEntry& e) { return e.id == id; });
  return it == pool.end() ? nullptr : &*it;
}

const PoolEntry& sample_opponent(std::span<const PoolEntry> pool, const PoolEntry& requester) {
  const PoolEntry* best = nullptr;
  double best_score = 0.0;
  for (const auto& c : pool) {
    if (!c.available || c.id == requester.id) continue;
    const double s = pairing_score(requester.rating, c.rating);
    if (best == nullptr || s > best_score ||
        (s == best_score && (c.rating.rd < best->rating.rd || (c.rating.rd == best->rating.rd && c.id < best->id)))) {
      best = &c;
      best_score = s;
    }
  }
  if (best == nullptr) throw pool_error("no available opponent for " + requester.id);
  return *best;
}

const PoolEntry& select_initiator(std::span<const PoolEntry> pool, const StartupMode& mode) {
  if (const auto* spec = std::get_if<SpecifiedStartup>(&mode)) {
    const PoolEntry* e = find_entry(pool, spec->id);
    if (e == nullptr) throw pool_error("unknown player id: " + spec->id);
    return *e;
  }
  std::vector<const PoolEntry*> available;
  for (const auto& e : pool) {
    if (e.available) available.push_back(&e);
  }
  if (available.empty()) throw pool_error("no available player to start a round");
  util::Rng rng(util::mix64(std::get<RandomStartup>(mode).seed));
  return *available[rng.uniform_index(available.size())];
}

nlohmann::ordered_json pool_to_json(std::span<const PoolEntry> pool) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : pool) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["r"] = e.rating.r;
    j["rd"] = e.rating.rd;
    j["games"] = e.rating.games_played;
    j["mode"] = e.mode;
    j["legal_moves_flag"] = e.legal_moves_flag;
    arr.push_back(std::move(j));
  }
  return arr;
}

Pool pool_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw pool_error("pool document must be a JSON array");
  Pool pool;
  try {
    for (const auto& j : doc) {
      PoolEntry e;
      e.id = j.at("id").get<std::string>();
      e.rating.r = j.at("r").get<double>();
      e.rating.rd = j.at("rd").get<double>();
      e.rating.games_played = j.at("games").get<int>();
      e.mode = j.value("mode", std::string("blitz"));
      e.legal_moves_flag = j.value("legal_moves_flag", false);
      pool.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw pool_error(std::string("malformed pool entry: ") + ex.what());
  }
  validate_pool(pool);
  return pool;
}

namespace {

nlohmann::ordered_json state_json(const RatingState& s) {
  return {{"r", s.r}, {"rd", s.rd}, {"games", s.games_played}};
}

RatingState state_from(const nlohmann::json& j) {
  return {j.at("r").get<double>(), j.at("rd").get<double>(), j.at("games").get<int>()};
}

}  // namespace

nlohmann::ordered_json update_to_json(const RatingUpdate& u) {
  nlohmann::ordered_json j;
  j["game_id"] = u.game_id;
  j["white"] = u.white;
  j["black"] = u.black;
  j["white_score"] = u.white_score;
  j["white_before"] = state_json(u.white_before);
  j["black_before"] = state_json(u.black_before);
  j["white_after"] = state_json(u.white_after);
  j["black_after"] = state_json(u.black_after);
  return j;
}

RatingUpdate update_from_json(const nlohmann::json& j) {
  RatingUpdate u;
  u.game_id = j.at("game_id").get<std::string>();
  u.white = j.at("white").get<std::string>();
  u.black = j.at("black").get<std::string>();
  u.white_score = j.at("white_score").get<double>();
  u.white_before = state_from(j.at("white_before"));
  u.black_before = state_from(j.at("black_before"));
  u.white_after = state_from(j.at("white_after"));
  u.black_after = state_from(j.at("black_after"));
  return u;
}

RatingBook::RatingBook(Pool pool, RatingConfig cfg) : pool_(std::move(pool)), cfg_(cfg) {
  cfg_.validate();
  validate_pool(pool_);
}

RatingUpdate RatingBook::apply(const std::string& game_id, const std::string& white, const std::string& black,
                               MatchOutcome white_outcome) {
  std::lock_guard lock(mu_);
  PoolEntry* w = find_entry(std::span<PoolEntry>(pool_), white);
  PoolEntry* b = find_entry(std::span<PoolEntry>(pool_), black);
  if (w == nullptr || b == nullptr) throw pool_error("rating update for unknown player in game " + game_id);
  if (w == b) throw pool_error("player cannot play itself: " + white);
  RatingUpdate u{game_id, white, black, score_of(white_outcome), w->rating, b->rating, {}, {}};
  std::tie(u.white_after, u.black_after) = update_game(w->rating, b->rating, white_outcome, cfg_);
  w->rating = u.white_after;
  b->rating = u.black_after;
  if (sink_) sink_(u);
  return u;
}

void RatingBook::replay(const RatingUpdate& update) {
  std::lock_guard lock(mu_);
  PoolEntry* w = find_entry(std::span<PoolEntry>(pool_), update.white);
  PoolEntry* b = find_entry(std::span<PoolEntry>(pool_), update.black);
  if (w == nullptr || b == nullptr) throw pool_error("replayed update for unknown player in game " + update.game_id);
  w->rating = update.white_after;
  b->rating = update.black_after;
}

void RatingBook::on_update(std::function<void(const RatingUpdate&)> sink) {
  std::lock_guard lock(mu_);
  sink_ = std::move(sink);
}

Pool RatingBook::snapshot() const {
  std::lock_guard lock(mu_);
  return pool_;
}

RatingState RatingBook::state_of(const std::string& id) const {
  std::lock_guard lock(mu_);
  const PoolEntry* e = find_entry(std::span<const PoolEntry>(pool_), id);
  if (e == nullptr) throw pool_error("unknown player id: " + id);
  return e->rating;
}

}  // namespace chessarena::rating
