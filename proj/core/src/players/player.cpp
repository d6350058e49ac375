#include "chessarena/players/player.hpp"

#include <cstdlib>
#include <thread>

#include <spdlog/spdlog.h>

#include "chessarena/util/hash.hpp"
#include "chessarena/util/json_check.hpp"

namespace chessarena::players {

chess::Move random_player_move(const chess::Board& board, util::Rng& rng) {
  const auto legal = board.legal_moves();
  if (legal.empty()) throw std::invalid_argument("random player asked to move in a terminal position");
  return legal[rng.uniform_index(legal.size())];
}

LlmPlayer::LlmPlayer(PlayerSpec spec, std::shared_ptr<ChatClient> client, RetryPolicy retry)
    : Player(std::move(spec)), client_(std::move(client)), retry_(retry) {
  if (!client_) throw std::invalid_argument("llm player needs a chat client");
  if (retry_.max_attempts < 1) throw std::invalid_argument("max_attempts must be positive");
}

std::optional<ChatResponse> LlmPlayer::call_with_retry(const ChatRequest& req, int attempt, std::string& error) {
  for (int tries = 0; tries < 2; ++tries) {
    try {
      return client_->complete(req);
    } catch (const transport_error& e) {
      if (e.fatal()) throw game_aborted(spec().id + ": " + e.what());
      error = e.what();
      spdlog::warn("{}: transport error on attempt {} ({}){}", spec().id, attempt, e.what(),
                   tries == 0 ? ", retrying" : "");
      if (tries == 0) std::this_thread::sleep_for(retry_.backoff * (1 << std::min(attempt - 1, 6)));
    }
  }
  return std::nullopt;
}

MoveDecision LlmPlayer::request_move(const PromptContext& ctx) {
  MoveDecision decision;
  auto messages = build_messages(spec(), ctx);
  decision.prompt_digest = util::digest(messages_to_json(messages).dump());
  const auto& m = spec().model;
  bool only_transport = true;
  for (int i = 1; i <= retry_.max_attempts; ++i) {
    ChatRequest req{m.name, messages, m.temperature, m.top_p, m.effective_max_tokens()};
    std::string error;
    const auto response = call_with_retry(req, i, error);
    if (!response) {
      MoveAttempt a;
      a.index = i;
      a.outcome = AttemptOutcome::transport_error;
      a.detail = error;
      decision.attempts.push_back(std::move(a));
      continue;
    }
    MoveAttempt a = extract_move(response->content, spec().mode, ctx.board, response->reasoning.value_or(""));
    a.index = i;
    a.reasoning = response->reasoning;
    a.prompt_tokens = response->prompt_tokens;
    a.completion_tokens = response->completion_tokens;
    const bool ok = a.outcome == AttemptOutcome::ok;
    if (ok) decision.move = a.move->move;
    const FailureKind kind = failure_kind(a.outcome);
    decision.attempts.push_back(std::move(a));
    if (ok) return decision;
    only_transport = false;
    messages.push_back({ChatMessage::Role::assistant, response->content});
    messages.push_back({ChatMessage::Role::user, corrective_message(kind)});
  }
  if (only_transport) throw game_aborted(spec().id + ": every attempt failed in transport");
  return decision;
}

EnginePlayer::EnginePlayer(PlayerSpec spec, engine::UciEngine engine) : Player(std::move(spec)), engine_(std::move(engine)) {}

MoveDecision EnginePlayer::request_move(const PromptContext& ctx) {
  const auto& e = spec().engine;
  engine::SearchLimits limits{e.depth, e.nodes, e.movetime_ms};
  MoveDecision d;
  try {
    const auto mv = engine_.best_move(ctx.board.fen(), limits);
    MoveAttempt a;
    a.outcome = AttemptOutcome::ok;
    a.move = chess::MoveToken{mv, mv.uci(), chess::Notation::uci};
    a.raw = "bestmove " + mv.uci();
    a.candidate = mv.uci();
    d.move = mv;
    d.attempts.push_back(std::move(a));
  } catch (const engine::engine_error& err) {
    throw game_aborted(spec().id + ": " + err.what());
  }
  return d;
}

MoveDecision RandomPlayer::request_move(const PromptContext& ctx) {
  const auto mv = random_player_move(ctx.board, rng_);
  MoveDecision d;
  MoveAttempt a;
  a.outcome = AttemptOutcome::ok;
  a.move = chess::MoveToken{mv, mv.uci(), chess::Notation::uci};
  a.raw = mv.uci();
  a.candidate = mv.uci();
  d.move = mv;
  d.attempts.push_back(std::move(a));
  return d;
}

std::shared_ptr<ChatClient> default_chat_client(const PlayerSpec& spec) {
  std::string key;
  if (!spec.model.api_key_env.empty()) {
    const char* v = std::getenv(spec.model.api_key_env.c_str());
    if (v == nullptr || *v == '\0') {
      throw util::config_error("player[" + spec.id + "]: environment variable " + spec.model.api_key_env +
                               " is not set");
    }
    key = v;
  }
  return make_http_chat_client(spec.model.endpoint, key,
                               std::chrono::milliseconds(static_cast<long long>(spec.model.timeout_s * 1000)));
}

std::unique_ptr<Player> make_player(const PlayerSpec& spec, std::uint64_t seed, const PlayerFactory& factory) {
  switch (spec.kind) {
    case PlayerKind::random:
      return std::make_unique<RandomPlayer>(spec, seed);
    case PlayerKind::uci_engine: {
      const std::string cmd = spec.engine.command.empty() ? factory.default_engine_command : spec.engine.command;
      if (cmd.empty()) throw util::config_error("player[" + spec.id + "].engine.command: no engine command configured");
      return std::make_unique<EnginePlayer>(spec, engine::UciEngine::start(cmd, factory.engine_options));
    }
    case PlayerKind::llm_api: {
      auto client = factory.chat ? factory.chat(spec) : default_chat_client(spec);
      return std::make_unique<LlmPlayer>(spec, std::move(client), factory.retry);
    }
  }
  throw std::logic_error("unhandled player kind");
}

}  // namespace chessarena::players
