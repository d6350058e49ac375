#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chessarena/rating/glicko.hpp"

namespace chessarena::rating {

struct PoolEntry {
  std::string id;
  RatingState rating;
  bool available{true};
  std::string mode{"blitz"};
  bool legal_moves_flag{false};

  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

class pool_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Pool = std::vector<PoolEntry>;

/// Throws pool_error on duplicate or empty ids.
void validate_pool(std::span<const PoolEntry> pool);

const PoolEntry* find_entry(std::span<const PoolEntry> pool, std::string_view id);
PoolEntry* find_entry(std::span<PoolEntry> pool, std::string_view id);

/// Available entry other than the requester with the highest pairing score;
/// ties go to the lower rd, then the smaller id. Throws pool_error when no
/// candidate exists.
const PoolEntry& sample_opponent(std::span<const PoolEntry> pool, const PoolEntry& requester);

struct RandomStartup {
  std::uint64_t seed{0};
};
struct SpecifiedStartup {
  std::string id;
};
using StartupMode = std::variant<RandomStartup, SpecifiedStartup>;

/// Random mode draws uniformly over available entries; specified mode
/// returns the named entry or throws pool_error.
const PoolEntry& select_initiator(std::span<const PoolEntry> pool, const StartupMode& mode);

/// Array of {id, r, rd, games, mode, legal_moves_flag} in that key order.
nlohmann::ordered_json pool_to_json(std::span<const PoolEntry> pool);
Pool pool_from_json(const nlohmann::json& doc);

struct RatingUpdate {
  std::string game_id;
  std::string white;
  std::string black;
  double white_score{0.5};
  RatingState white_before;
  RatingState black_before;
  RatingState white_after;
  RatingState black_after;
};

nlohmann::ordered_json update_to_json(const RatingUpdate& u);
RatingUpdate update_from_json(const nlohmann::json& j);

/// Owns the pool and serializes every mutation. Updates are applied in the
/// order apply() calls complete; snapshot() is safe from any thread.
class RatingBook {
 public:
  RatingBook(Pool pool, RatingConfig cfg);

  /// Applies one finished game using both players' state at this moment.
  RatingUpdate apply(const std::string& game_id, const std::string& white, const std::string& black,
                     MatchOutcome white_outcome);

  /// Re-applies a persisted update by installing its post-game states.
  void replay(const RatingUpdate& update);

  /// Called under the lock after each update, in application order.
  void on_update(std::function<void(const RatingUpdate&)> sink);

  Pool snapshot() const;
  RatingState state_of(const std::string& id) const;
  const RatingConfig& config() const noexcept { return cfg_; }

 private:
  mutable std::mutex mu_;
  Pool pool_;
  RatingConfig cfg_;
  std::function<void(const RatingUpdate&)> sink_;
};

}  // namespace chessarena::rating
