#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "chessarena/arena/arena.hpp"
#include "chessarena/arena/leaderboard.hpp"
#include "chessarena/chess/notation.hpp"
#include "chessarena/evals/basic.hpp"
#include "chessarena/evals/moves.hpp"
#include "chessarena/evals/puzzles.hpp"
#include "chessarena/util/fs.hpp"
#include "chessarena/util/json_check.hpp"
#include "chessarena/util/rng.hpp"
#include "run_config.hpp"

namespace chessarena::cli {

namespace {

using nlohmann::ordered_json;

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kBasicFenTag = 0xb451c;

// --- configuration ---------------------------------------------------------

RunConfig require_config(const CommonArgs& c) {
  if (!c.config) throw usage_error("--config is required for this command");
  auto cfg = load_run_config(*c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.concurrency) {
    if (*c.concurrency <= 0) throw usage_error("--concurrency must be positive");
    cfg.concurrency = *c.concurrency;
  }
  if (c.annotate) cfg.annotate = true;
  if (c.engine) cfg.engine.path = *c.engine;
  if (c.depth) cfg.engine.depth = *c.depth;
  if (cfg.engine.path.empty()) cfg.engine.path = resolve_engine_path(std::nullopt, nullptr);
  return cfg;
}

std::optional<RunConfig> optional_config(const CommonArgs& c) {
  if (!c.config) return std::nullopt;
  return require_config(c);
}

const players::PlayerSpec& player_in(const RunConfig& cfg, const std::string& id) {
  const auto* spec = find_player(cfg, id);
  if (spec == nullptr) throw usage_error("player '" + id + "' is not in the config");
  return *spec;
}

engine::EngineOptions engine_options(const RunConfig& cfg) {
  engine::EngineOptions o;
  o.threads = cfg.engine.threads;
  o.hash_mb = cfg.engine.hash_mb;
  return o;
}

players::PlayerFactory factory_for(const RunConfig& cfg, players::RetryPolicy retry = {}) {
  players::PlayerFactory f;
  f.retry = retry;
  f.default_engine_command = cfg.engine.path;
  f.engine_options = engine_options(cfg);
  return f;
}

// Everything that can fail without touching the network: API key variables,
// endpoints and engine binaries.
void preflight(const RunConfig& cfg, const std::vector<std::string>& ids) {
  std::set<std::string> started;
  for (const auto& id : ids) {
    const auto& spec = player_in(cfg, id);
    if (spec.kind == players::PlayerKind::llm_api) {
      if (spec.model.endpoint.empty()) throw util::config_error("player[" + id + "].model.endpoint: missing");
      if (spec.model.name.empty()) throw util::config_error("player[" + id + "].model.name: missing");
      players::default_chat_client(spec);
    } else if (spec.kind == players::PlayerKind::uci_engine) {
      const auto cmd = spec.engine.command.empty() ? cfg.engine.path : spec.engine.command;
      if (started.insert(cmd).second) engine::UciEngine::start(cmd, engine_options(cfg));
    }
  }
}

// Shared engine behind a lock; games on several workers queue for it.
struct EngineAnnotator {
  std::mutex mu;
  engine::UciEngine engine;
  engine::AnalysisCache cache;
  int depth;

  EngineAnnotator(engine::UciEngine e, std::filesystem::path cache_path, int d)
      : engine(std::move(e)), cache(std::move(cache_path)), depth(d) {}
};

arena::Annotator make_annotator(const RunConfig& cfg, const std::filesystem::path& run_dir) {
  auto state = std::make_shared<EngineAnnotator>(engine::UciEngine::start(cfg.engine.path, engine_options(cfg)),
                                                 run_dir / "analysis.jsonl", cfg.engine.depth);
  return [state](const std::string& fen) {
    std::lock_guard lock(state->mu);
    return engine::analyze_cached(state->engine, state->cache, fen, state->depth);
  };
}

ordered_json manifest_of(const RunConfig& cfg) {
  auto full = run_config_to_json(cfg);
  ordered_json m;
  m["players"] = full["players"];
  m["rating"] = full["rating"];
  return m;
}

// run.json pins the player set and rating settings of a run directory so a
// rerun with a different config cannot mix into it.
void claim_run_dir(const std::filesystem::path& run_dir, const RunConfig& cfg,
                   std::optional<std::uint64_t> tournament_seed = std::nullopt) {
  std::filesystem::create_directories(run_dir);
  const auto path = run_dir / "run.json";
  auto manifest = manifest_of(cfg);
  if (std::filesystem::exists(path)) {
    const auto stored = nlohmann::json::parse(util::read_file(path));
    for (const char* key : {"players", "rating"}) {
      if (nlohmann::json(manifest[key]) != stored.at(key)) {
        throw usage_error(path.string() + ": run directory was created with different " + key +
                          "; use a fresh --run-dir");
      }
    }
    if (tournament_seed && stored.contains("tournament_seed") &&
        stored["tournament_seed"].get<std::uint64_t>() != *tournament_seed) {
      throw usage_error(path.string() + ": run directory holds a tournament with seed " +
                        std::to_string(stored["tournament_seed"].get<std::uint64_t>()));
    }
    if (stored.contains("tournament_seed")) manifest["tournament_seed"] = stored["tournament_seed"];
  }
  if (tournament_seed) manifest["tournament_seed"] = *tournament_seed;
  util::write_file_atomic(path, manifest.dump(2) + "\n");
}

arena::ArenaContext arena_context(const RunConfig& cfg, const std::filesystem::path& run_dir) {
  arena::ArenaContext ctx;
  ctx.players = cfg.players;
  ctx.make_player = arena::default_player_maker(factory_for(cfg));
  ctx.concurrency = cfg.concurrency;
  ctx.game.ply_cap = cfg.ply_cap;
  ctx.game.run_dir = run_dir;
  ctx.game.stop = &stop_flag();
  if (cfg.annotate) ctx.game.annotator = make_annotator(cfg, run_dir);
  return ctx;
}

// --- rendering ---------------------------------------------------------------

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string result_string(const arena::GameRecord& g) {
  if (g.aborted) return "aborted";
  if (!g.white_score) return "*";
  if (*g.white_score == 1.0) return "1-0";
  if (*g.white_score == 0.0) return "0-1";
  return "1/2-1/2";
}

std::string game_line(const arena::GameRecord& g) {
  std::string line = g.id + "  " + g.white + " " + result_string(g) + " " + g.black;
  if (g.termination) {
    line += "  (" + std::string(chess::to_string(g.termination->reason)) + ", " + std::to_string(g.plies.size()) +
            " plies)";
  } else if (g.aborted) {
    line += "  (" + g.abort_reason + ")";
  }
  return line;
}

void print_leaderboard(std::ostream& out, const rating::Pool& pool, double threshold, bool all) {
  const auto board = arena::compute_leaderboard(pool, threshold, all);
  out << arena::leaderboard_markdown(board);
  if (!all && board.size() < pool.size()) {
    out << "\n" << pool.size() - board.size() << " players with RD above " << fixed(threshold, 0)
        << " hidden; use --all to list them\n";
  }
}

// --- evals -------------------------------------------------------------------

std::filesystem::path eval_dir(const CommonArgs& c, const std::optional<RunConfig>& cfg,
                               const std::optional<std::string>& out, const char* task) {
  if (out) return *out;
  return resolve_run_dir(c.run_dir, cfg ? &*cfg : nullptr) / "evals" / task;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<ordered_json>& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  util::write_file_atomic(path, text);
}

void check_stop() {
  if (stop_flag().load()) throw arena::interrupted("stop requested");
}

// Config entry if present; otherwise the built-in "random" and "stockfish".
players::PlayerSpec eval_player_spec(const std::string& id, const std::optional<RunConfig>& cfg,
                                     const CommonArgs& c) {
  players::PlayerSpec spec;
  if (cfg && find_player(*cfg, id) != nullptr) {
    spec = *find_player(*cfg, id);
  } else if (id == "random") {
    spec.id = "random";
    spec.kind = players::PlayerKind::random;
  } else if (id == "stockfish") {
    spec.id = "stockfish";
    spec.kind = players::PlayerKind::uci_engine;
    spec.engine.command = resolve_engine_path(c.engine, cfg ? &*cfg : nullptr);
    spec.engine.depth = 12;
  } else {
    throw usage_error("unknown player '" + id + "'; pass --config or use random or stockfish");
  }
  if (spec.kind == players::PlayerKind::uci_engine && c.depth) {
    spec.engine.depth = *c.depth;
    spec.engine.nodes.reset();
    spec.engine.movetime_ms.reset();
  }
  return spec;
}

std::unique_ptr<players::Player> eval_player(const players::PlayerSpec& spec, const std::optional<RunConfig>& cfg,
                                             const CommonArgs& c) {
  RunConfig base = cfg ? *cfg : RunConfig{};
  base.engine.path = resolve_engine_path(c.engine, cfg ? &*cfg : nullptr);
  // One prediction per item: no corrective retries.
  auto factory = factory_for(base, players::RetryPolicy{1, std::chrono::milliseconds(1000)});
  return players::make_player(spec, util::derive_seed(c.seed.value_or(base.seed), 0xe7a1), factory);
}

std::vector<std::string> read_fens(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw usage_error("fens file not found: " + path.string());
  std::istringstream in(util::read_file(path));
  std::vector<std::string> fens;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    auto fen = line.substr(b, e - b + 1);
    try {
      chess::Board::parse_fen(fen);
    } catch (const chess::FenError& err) {
      throw usage_error(path.string() + ":" + std::to_string(line_no) + ": " + err.what());
    }
    fens.push_back(std::move(fen));
  }
  if (fens.empty()) throw usage_error(path.string() + ": no positions");
  return fens;
}

// Positions reached by seeded random playouts of 0 to 79 plies.
std::vector<std::string> playout_fens(std::size_t n, std::uint64_t seed) {
  std::vector<std::string> fens;
  for (std::size_t i = 0; fens.size() < n; ++i) {
    util::Rng rng(util::derive_seed(seed ^ kBasicFenTag, i));
    auto board = chess::Board::start();
    const auto plies = rng.uniform_index(80);
    for (std::size_t p = 0; p < plies; ++p) {
      const auto legal = board.legal_moves();
      if (legal.empty()) break;
      board = board.apply(legal[rng.uniform_index(legal.size())]);
    }
    if (!board.legal_moves().empty()) fens.push_back(board.fen());
  }
  return fens;
}

std::string ask_with_retry(players::ChatClient& client, const players::ChatRequest& req) {
  for (int attempt = 1;; ++attempt) {
    try {
      return client.complete(req).content;
    } catch (const players::transport_error& e) {
      if (e.fatal() || attempt >= 3) throw;
      spdlog::warn("chat request failed ({}); retrying", e.what());
      std::this_thread::sleep_for(std::chrono::seconds(attempt));
    }
  }
}

}  // namespace

std::atomic<bool>& stop_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

// --- commands ----------------------------------------------------------------

int cmd_tournament(const TournamentArgs& args, std::ostream& out) {
  auto cfg = require_config(args.common);
  if (args.rounds <= 0) throw usage_error("--rounds must be positive");
  arena::TournamentConfig tc;
  tc.rounds = args.rounds;
  tc.games_per_match = cfg.games_per_match;
  tc.seed = cfg.seed;
  tc.retire_reliable = cfg.retire_reliable;
  if (args.startup == "random") {
    tc.startup = rating::RandomStartup{cfg.seed};
  } else if (args.startup.rfind("specified:", 0) == 0) {
    const auto id = args.startup.substr(10);
    player_in(cfg, id);
    tc.startup = rating::SpecifiedStartup{id};
  } else {
    throw usage_error("--startup must be random or specified:<id>");
  }
  if (cfg.players.size() < 2) throw usage_error("a tournament needs at least two players");

  std::vector<std::string> ids;
  for (const auto& p : cfg.players) ids.push_back(p.id);
  preflight(cfg, ids);
  const auto run_dir = resolve_run_dir(args.common.run_dir, &cfg);
  claim_run_dir(run_dir, cfg, cfg.seed);

  arena::Arena arena(arena_context(cfg, run_dir), arena::initial_pool(cfg.players, cfg.rating), cfg.rating);
  const auto rounds = arena.run_tournament(tc);
  for (const auto& r : rounds) {
    out << "round " << r.round << ": " << r.initiator << " vs " << r.opponent << "  " << fixed(r.initiator_points, 1)
        << "/" << r.games.size();
    if (r.aborted > 0) out << " (" << r.aborted << " aborted)";
    out << "\n";
  }
  out << "\n";
  print_leaderboard(out, arena.book().snapshot(), cfg.rating.display_rd_threshold, false);
  out << "\nrun directory: " << run_dir.string() << "\n";
  return kOk;
}

int cmd_match(const MatchArgs& args, std::ostream& out) {
  auto cfg = require_config(args.common);
  const int n = args.n.value_or(cfg.games_per_match);
  if (n <= 0 || n % 2 != 0) throw usage_error("--n must be a positive even number, got " + std::to_string(n));
  if (args.a == args.b) throw usage_error("a player cannot play itself");
  player_in(cfg, args.a);
  player_in(cfg, args.b);
  preflight(cfg, {args.a, args.b});
  const auto run_dir = resolve_run_dir(args.common.run_dir, &cfg);
  claim_run_dir(run_dir, cfg);

  arena::Arena arena(arena_context(cfg, run_dir), arena::initial_pool(cfg.players, cfg.rating), cfg.rating);
  const auto games = arena.run_match({args.a, args.b, n}, cfg.seed);
  arena.write_artifacts();
  double points = 0;
  for (const auto& g : games) {
    out << game_line(g) << "\n";
    points += g.score_of(args.a).value_or(0.0);
  }
  out << args.a << " scored " << fixed(points, 1) << "/" << games.size() << " against " << args.b << "\n";
  for (const auto& id : {args.a, args.b}) {
    const auto s = arena.book().state_of(id);
    out << id << ": r " << fixed(s.r, 1) << ", rd " << fixed(s.rd, 1) << ", games " << s.games_played << "\n";
  }
  return kOk;
}

int cmd_game(const GameArgs& args, std::ostream& out) {
  auto cfg = require_config(args.common);
  if (args.white == args.black) throw usage_error("a player cannot play itself");
  const auto& white_spec = player_in(cfg, args.white);
  const auto& black_spec = player_in(cfg, args.black);
  preflight(cfg, {args.white, args.black});
  const auto run_dir = resolve_run_dir(args.common.run_dir, &cfg);
  claim_run_dir(run_dir, cfg);

  const auto id = arena::game_id(args.white, args.black, cfg.seed, args.index);
  auto stored = arena::load_game(run_dir, id);
  if (stored && (stored->finished() || stored->aborted) &&
      (!cfg.annotate || stored->plies.empty() || stored->plies.front().q.has_value())) {
    out << game_line(*stored) << "\n" << arena::game_path(run_dir, id).string() << "\n";
    return kOk;
  }
  auto ctx = arena_context(cfg, run_dir);
  auto white = ctx.make_player(white_spec, black_spec, chess::Color::white, cfg.seed);
  auto black = ctx.make_player(black_spec, white_spec, chess::Color::black, cfg.seed);
  const auto record = arena::play_game(*white, *black, ctx.game, cfg.seed, args.index);
  out << game_line(record) << "\n" << arena::game_path(run_dir, record.id).string() << "\n";
  return kOk;
}

int cmd_eval_basic(const BasicEvalArgs& args, std::ostream& out) {
  const auto cfg = optional_config(args.common);
  if (args.n == 0) throw usage_error("--n must be positive");
  const std::uint64_t seed = args.common.seed.value_or(cfg ? cfg->seed : 1);
  const auto fens = args.fens ? read_fens(*args.fens) : playout_fens(args.n, seed);
  const auto items = evals::build_basic_understanding_set(fens, args.n, seed);
  const auto dir = eval_dir(args.common, cfg, args.out, "basic");
  std::filesystem::create_directories(dir);
  std::vector<ordered_json> lines;
  for (const auto& item : items) lines.push_back(evals::basic_item_to_json(item));
  write_jsonl(dir / "items.jsonl", lines);
  out << "wrote " << items.size() << " items to " << (dir / "items.jsonl").string() << "\n";
  if (!args.player) return kOk;

  if (!cfg) throw usage_error("--player needs --config naming an llm_api player");
  const auto& spec = player_in(*cfg, *args.player);
  if (spec.kind != players::PlayerKind::llm_api) throw usage_error("basic understanding needs an llm_api player");
  preflight(*cfg, {spec.id});
  auto client = players::default_chat_client(spec);
  std::vector<std::string> responses;
  std::vector<ordered_json> rows;
  for (const auto& item : items) {
    check_stop();
    players::ChatRequest req{spec.model.name, evals::basic_prompt(item), spec.model.temperature, spec.model.top_p,
                             spec.model.effective_max_tokens()};
    responses.push_back(ask_with_retry(*client, req));
  }
  const auto score = evals::score_basic_understanding(items, responses);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& r = score.rows[i];
    ordered_json j;
    j["fen"] = items[i].fen;
    j["square"] = items[i].square.to_string();
    j["parsed"] = r.parsed;
    j["piece_match"] = r.piece_match;
    j["true_positive"] = r.true_positive;
    j["predicted"] = r.predicted;
    j["expected"] = r.expected;
    j["response"] = responses[i];
    rows.push_back(std::move(j));
  }
  write_jsonl(dir / "rows.jsonl", rows);
  ordered_json summary{{"player", spec.id},         {"items", items.size()},       {"pma", score.pma},
                       {"precision", score.precision}, {"recall", score.recall}, {"averaging", "micro"}};
  util::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  out << "| Player | PMA | Precision | Recall | Items |\n|---|---:|---:|---:|---:|\n"
      << "| " << spec.id << " | " << fixed(score.pma, 1) << " | " << fixed(score.precision, 1) << " | "
      << fixed(score.recall, 1) << " | " << items.size() << " |\n";
  return kOk;
}

int cmd_eval_moves(const MovesEvalArgs& args, std::ostream& out) {
  const auto cfg = optional_config(args.common);
  if (!std::filesystem::exists(args.items)) throw usage_error("items file not found: " + args.items);
  const auto items = evals::load_move_items(args.items);
  if (items.empty()) throw usage_error(args.items + ": no items");
  const auto spec = eval_player_spec(args.player, cfg, args.common);
  auto player = eval_player(spec, cfg, args.common);

  std::vector<evals::MoveRow> rows;
  for (const auto& item : items) {
    check_stop();
    const auto part = evals::run_move_selection(*player, std::span(&item, 1));
    rows.push_back(part.rows.front());
  }
  const auto report = evals::aggregate_moves(rows);
  const auto dir = eval_dir(args.common, cfg, args.out, "moves");
  std::filesystem::create_directories(dir);
  std::vector<ordered_json> lines;
  for (std::size_t i = 0; i < items.size(); ++i) {
    ordered_json j;
    j["fen"] = items[i].fen;
    j.update(evals::move_row_to_json(report.rows[i]));
    lines.push_back(std::move(j));
  }
  write_jsonl(dir / "rows.jsonl", lines);
  ordered_json summary{{"player", spec.id},          {"items", items.size()},    {"legal_rate", report.legal_rate},
                       {"top_rate", report.top_rate}, {"mar", report.mar},         {"degenerate", report.degenerate}};
  util::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  out << "| Player | LR | TR | MAR | Items |\n|---|---:|---:|---:|---:|\n"
      << "| " << spec.id << " | " << fixed(report.legal_rate, 1) << " | " << fixed(report.top_rate, 1) << " | "
      << fixed(report.mar, 2) << " | " << items.size() << " |\n";
  return kOk;
}

int cmd_eval_puzzles(const PuzzleEvalArgs& args, std::ostream& out) {
  const auto cfg = optional_config(args.common);
  if (!std::filesystem::exists(args.csv)) throw usage_error("puzzle CSV not found: " + args.csv);
  const auto load = evals::load_lichess_puzzles(args.csv, {args.min_rating, args.max_rating, args.max});
  if (load.puzzles.empty()) throw usage_error(args.csv + ": no puzzles match the filter");
  const auto spec = eval_player_spec(args.player, cfg, args.common);
  auto player = eval_player(spec, cfg, args.common);

  std::vector<evals::PuzzleOutcome> outcomes;
  for (const auto& p : load.puzzles) {
    check_stop();
    outcomes.push_back(evals::run_puzzle(*player, p));
  }
  const auto report = evals::psa_report(outcomes);
  const auto dir = eval_dir(args.common, cfg, args.out, "puzzles");
  std::filesystem::create_directories(dir);
  std::vector<ordered_json> lines;
  for (const auto& o : outcomes) lines.push_back(evals::puzzle_outcome_to_json(o));
  write_jsonl(dir / "rows.jsonl", lines);
  ordered_json summary;
  summary["player"] = spec.id;
  summary["skipped_rows"] = load.skipped;
  summary.update(evals::psa_to_json(report));
  util::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  out << evals::psa_markdown(report);
  if (load.skipped > 0) out << "skipped " << load.skipped << " invalid rows\n";
  return kOk;
}

int cmd_leaderboard(const LeaderboardArgs& args, std::ostream& out) {
  const auto run_dir = resolve_run_dir(args.run_dir, nullptr);
  const auto path = arena::pool_path(run_dir);
  if (!std::filesystem::exists(path)) {
    throw usage_error("no pool.json in " + run_dir.string() + "; run a tournament or match there first");
  }
  const auto pool = rating::pool_from_json(nlohmann::json::parse(util::read_file(path)));
  double threshold = rating::RatingConfig{}.display_rd_threshold;
  if (const auto manifest = run_dir / "run.json"; std::filesystem::exists(manifest)) {
    const auto m = nlohmann::json::parse(util::read_file(manifest));
    threshold = m.at("rating").value("display_rd_threshold", threshold);
  }
  if (args.json) {
    out << arena::leaderboard_json(arena::compute_leaderboard(pool, threshold, args.all)).dump(2) << "\n";
  } else {
    print_leaderboard(out, pool, threshold, args.all);
  }
  return kOk;
}

int cmd_engine_check(const EngineCheckArgs& args, std::ostream& out) {
  const auto cfg = optional_config(args.common);
  RunConfig base = cfg ? *cfg : RunConfig{};
  base.engine.path = resolve_engine_path(args.common.engine, cfg ? &*cfg : nullptr);
  const int depth = args.common.depth.value_or(cfg ? cfg->engine.depth : 12);
  const auto fen = args.fen.empty() ? chess::Board::start().fen() : chess::Board::parse_fen(args.fen).fen();
  const auto t0 = std::chrono::steady_clock::now();
  auto eng = engine::UciEngine::start(base.engine.path, engine_options(base));
  out << "engine: " << eng.name() << " (" << base.engine.path << ")\n";
  const auto table = eng.analyze_all_moves(fen, depth);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  out << "depth " << depth << ", " << table.evals.size() << " moves scored in " << ms << " ms\n";
  out << "top moves:";
  for (const auto& mv : table.top_moves) out << " " << mv.uci() << " (" << fixed(table.find(mv)->win_rate, 3) << ")";
  out << "\n";
  return kOk;
}

// --- argument parsing ----------------------------------------------------------

namespace {

void add_config(CLI::App* app, CommonArgs& c, bool required) {
  auto* opt = app->add_option("--config", c.config, "Run config JSON file");
  if (required) opt->required();
}

void add_run_dir(CLI::App* app, std::optional<std::string>& run_dir) {
  app->add_option("--run-dir", run_dir, "Run directory (default: $CHESSARENA_RUN_DIR, then the config's run_dir)");
}

void add_seed(CLI::App* app, CommonArgs& c) { app->add_option("--seed", c.seed, "Seed (overrides the config)"); }

void add_engine(CLI::App* app, CommonArgs& c) {
  app->add_option("--engine", c.engine, "UCI engine command (default: config engine.path, then $CHESSARENA_ENGINE)");
  app->add_option("--depth", c.depth, "Engine search depth")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chess arena: LLM tournaments with Glicko ratings, and offline chess evaluations"};
  app.name(argv.empty() ? "chessarena" : argv.front());
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  TournamentArgs t;
  auto* tour = app.add_subcommand("tournament", "Run rating rounds over the configured pool");
  add_config(tour, t.common, true);
  tour->add_option("--rounds", t.rounds, "Number of rounds")->required()->check(CLI::PositiveNumber);
  tour->add_option("--startup", t.startup, "random, or specified:<player id>")->capture_default_str();
  add_seed(tour, t.common);
  add_run_dir(tour, t.common.run_dir);
  tour->add_option("--concurrency", t.common.concurrency, "Games played in parallel");
  tour->add_flag("--annotate", t.common.annotate, "Score every ply with the engine");
  add_engine(tour, t.common);

  MatchArgs m;
  auto* match = app.add_subcommand("match", "Play and rate an even number of games between two players");
  match->add_option("a", m.a, "Player taking White in the first game")->required();
  match->add_option("b", m.b, "Opponent")->required();
  match->add_option("--n", m.n, "Number of games (even; default: config games_per_match)");
  add_config(match, m.common, true);
  add_seed(match, m.common);
  add_run_dir(match, m.common.run_dir);
  match->add_option("--concurrency", m.common.concurrency, "Games played in parallel");
  match->add_flag("--annotate", m.common.annotate, "Score every ply with the engine");
  add_engine(match, m.common);

  GameArgs g;
  auto* game = app.add_subcommand("game", "Play one unrated game and save its record");
  game->add_option("white", g.white, "White player id")->required();
  game->add_option("black", g.black, "Black player id")->required();
  game->add_option("--index", g.index, "Game index mixed into the game id")->capture_default_str();
  add_config(game, g.common, true);
  add_seed(game, g.common);
  add_run_dir(game, g.common.run_dir);
  game->add_flag("--annotate", g.common.annotate, "Score every ply with the engine");
  add_engine(game, g.common);

  auto* eval = app.add_subcommand("eval", "Offline evaluations");
  eval->require_subcommand(1);

  BasicEvalArgs eb;
  auto* basic = eval->add_subcommand("basic", "Build (and optionally score) the basic understanding set");
  basic->add_option("--n", eb.n, "Number of items")->capture_default_str()->check(CLI::PositiveNumber);
  add_seed(basic, eb.common);
  basic->add_option("--fens", eb.fens, "File with one FEN per line (default: seeded random playouts)");
  basic->add_option("--player", eb.player, "llm_api player from --config to score");
  basic->add_option("--out", eb.out, "Output directory (default: <run dir>/evals/basic)");
  add_config(basic, eb.common, false);
  add_run_dir(basic, eb.common.run_dir);

  MovesEvalArgs em;
  auto* moves = eval->add_subcommand("moves", "Move selection against engine-scored positions");
  moves->add_option("--items", em.items, "Move items JSONL")->required();
  moves->add_option("--player", em.player, "Player id: a config entry, random or stockfish")->required();
  moves->add_option("--out", em.out, "Output directory (default: <run dir>/evals/moves)");
  add_config(moves, em.common, false);
  add_seed(moves, em.common);
  add_run_dir(moves, em.common.run_dir);
  add_engine(moves, em.common);

  PuzzleEvalArgs ep;
  auto* puzzles = eval->add_subcommand("puzzles", "Puzzle solving accuracy on a Lichess puzzle CSV");
  puzzles->add_option("--csv", ep.csv, "Lichess puzzle CSV")->required();
  puzzles->add_option("--player", ep.player, "Player id: a config entry, random or stockfish")->required();
  puzzles->add_option("--max", ep.max, "Keep at most this many puzzles (0: all)")->capture_default_str();
  puzzles->add_option("--min-rating", ep.min_rating, "Lowest puzzle rating kept");
  puzzles->add_option("--max-rating", ep.max_rating, "Highest puzzle rating kept");
  puzzles->add_option("--out", ep.out, "Output directory (default: <run dir>/evals/puzzles)");
  add_config(puzzles, ep.common, false);
  add_seed(puzzles, ep.common);
  add_run_dir(puzzles, ep.common.run_dir);
  add_engine(puzzles, ep.common);

  LeaderboardArgs lb;
  auto* board = app.add_subcommand("leaderboard", "Print the leaderboard of a run directory");
  add_run_dir(board, lb.run_dir);
  board->add_flag("--all", lb.all, "Include players whose RD is above the display threshold");
  board->add_flag("--json", lb.json, "Print JSON instead of markdown");

  EngineCheckArgs ec;
  auto* check = app.add_subcommand("engine-check", "Start the engine and score one position");
  add_config(check, ec.common, false);
  add_engine(check, ec.common);
  check->add_option("--fen", ec.fen, "Position to analyse (default: start position)");

  std::vector<std::string> rest(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUserError;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*tour) return cmd_tournament(t, out);
    if (*match) return cmd_match(m, out);
    if (*game) return cmd_game(g, out);
    if (*basic) return cmd_eval_basic(eb, out);
    if (*moves) return cmd_eval_moves(em, out);
    if (*puzzles) return cmd_eval_puzzles(ep, out);
    if (*board) return cmd_leaderboard(lb, out);
    if (*check) return cmd_engine_check(ec, out);
  } catch (const arena::interrupted&) {
    err << "interrupted; progress is saved, rerun the same command to resume\n";
    return kInfraError;
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const util::config_error& e) {
    err << "config error: " << e.what() << "\n";
    return kUserError;
  } catch (const rating::pool_error& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const evals::puzzle_error& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const chess::FenError& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const engine::engine_error& e) {
    err << "engine error: " << e.what() << "\n";
    return kInfraError;
  } catch (const players::transport_error& e) {
    err << "endpoint error: " << e.what() << "\n";
    return kInfraError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInfraError;
  }
  return kUserError;
}

}  // namespace chessarena::cli
