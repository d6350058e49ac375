#include <gtest/gtest.h>

#include <httplib.h>

#include <cmath>
#include <map>
#include <thread>

#include "chessarena/chess/board.hpp"
#include "chessarena/chess/notation.hpp"
#include "chessarena/players/extract.hpp"
#include "chessarena/players/player.hpp"
#include "chessarena/players/prompts.hpp"
#include "chessarena/util/json_check.hpp"
#include "scripted_chat.hpp"
#include "test_data.hpp"

using namespace chessarena::players;
using chessarena::chess::Board;
using chessarena::chess::Color;
using chessarena::chess::Move;
using chessarena::testing::ScriptedChat;
using Role = ChatMessage::Role;

namespace {

Move uci(std::string_view s) { return *chessarena::chess::parse_uci(s); }

std::string fixture(const std::string& name) {
  std::string s = chessarena::testing::read_text(chessarena::testing::data_path("prompts/" + name));
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

PlayerSpec llm(PlayMode mode, bool legal) {
  PlayerSpec s;
  s.id = "model";
  s.kind = PlayerKind::llm_api;
  s.mode = mode;
  s.provide_legal_moves = legal;
  s.model.endpoint = "http://localhost";
  s.model.name = "test-model";
  return s;
}

PromptContext context(const std::vector<std::string>& moves) {
  PromptContext ctx;
  for (const auto& m : moves) {
    ctx.moves.push_back(uci(m));
    ctx.board = ctx.board.apply(uci(m));
  }
  return ctx;
}

RetryPolicy no_wait() { return {5, std::chrono::milliseconds(0)}; }

}  // namespace

TEST(Prompts, GoldenSystemMessages) {
  EXPECT_EQ(system_prompt(PlayMode::blitz, Color::white), fixture("system_blitz_white.txt"));
  EXPECT_EQ(system_prompt(PlayMode::standard, Color::white), fixture("system_blitz_white.txt"));
  EXPECT_EQ(system_prompt(PlayMode::bullet, Color::black), fixture("system_bullet_black.txt"));
  EXPECT_EQ(system_prompt(PlayMode::blindfold, Color::white), fixture("system_blindfold_white.txt"));
  EXPECT_NE(system_prompt(PlayMode::bullet, Color::black)
                .find("I will not accept your answer if there are any other words"),
            std::string::npos);
}

TEST(Prompts, GoldenModeByLegalFlag) {
  const auto ctx = context({});
  for (auto mode : {PlayMode::bullet, PlayMode::blitz, PlayMode::standard}) {
    for (bool legal : {false, true}) {
      const auto msgs = build_prompt(llm(mode, legal), ctx);
      ASSERT_EQ(msgs.size(), 2u);
      EXPECT_EQ(msgs[0].role, Role::system);
      EXPECT_EQ(msgs[0].content, system_prompt(mode, Color::white));
      EXPECT_EQ(msgs[1].role, Role::user);
      EXPECT_EQ(msgs[1].content, fixture(legal ? "user_start_legal.txt" : "user_start_nolegal.txt"));
    }
  }
  for (bool legal : {false, true}) {
    const auto msgs = build_messages(llm(PlayMode::blindfold, legal), ctx);
    ASSERT_EQ(msgs.size(), 2u);
    EXPECT_EQ(msgs[0].content, fixture("system_blindfold_white.txt"));
    const std::string first = "This is the beginning of the game.";
    EXPECT_EQ(msgs[1].content, legal ? first + "\n" + legal_moves_line(Board::start()) : first);
  }
}

TEST(Prompts, HistoryFormats) {
  const auto ctx = context({"e2e4", "e7e5", "g1f3", "b8c6", "f1c4", "f8c5", "b1c3", "g8f6"});
  EXPECT_EQ(build_prompt(llm(PlayMode::blitz, false), ctx)[1].content, fixture("user_history_uci.txt"));
  auto pgn = llm(PlayMode::blitz, false);
  pgn.history = HistoryFormat::pgn;
  EXPECT_EQ(build_prompt(pgn, ctx)[1].content, fixture("user_history_pgn.txt"));
  auto none = llm(PlayMode::blitz, false);
  none.history = HistoryFormat::none;
  EXPECT_EQ(build_prompt(none, ctx)[1].content.find("history"), std::string::npos);

  const auto longer = context({"g1f3", "g8f6", "f3g1", "f6g8", "b1c3", "b8c6", "c3b1", "c6b8", "e2e4", "e7e5", "d2d4", "d7d5"});
  const auto line = history_line(llm(PlayMode::blitz, false), longer);
  EXPECT_EQ(line, "Move history in UCI notation: f3g1 f6g8 b1c3 b8c6 c3b1 c6b8 e2e4 e7e5 d2d4 d7d5.");
}

TEST(Prompts, LegalListHasAllMoves) {
  const auto msg = build_prompt(llm(PlayMode::blitz, true), context({}))[1].content;
  for (const auto& m : Board::start().legal_moves()) EXPECT_NE(msg.find(m.uci()), std::string::npos);
}

TEST(Prompts, CorrectiveMessagesAreFixed) {
  EXPECT_EQ(corrective_message(FailureKind::parsing_error), fixture("corrective_parsing_error.txt"));
  EXPECT_EQ(corrective_message(FailureKind::illegal_move), fixture("corrective_illegal_move.txt"));
  EXPECT_EQ(corrective_message(FailureKind::forbidden_thinking), fixture("corrective_forbidden_thinking.txt"));
}

TEST(Blindfold, Transcripts) {
  const auto spec = llm(PlayMode::blindfold, false);
  const auto opening = build_blindfold_conversation(spec, context({}));
  ASSERT_EQ(opening.size(), 2u);
  EXPECT_EQ(opening[1], (ChatMessage{Role::user, "This is the beginning of the game."}));

  const auto white = build_blindfold_conversation(spec, context({"e2e4", "e7e5"}));
  ASSERT_EQ(white.size(), 4u);
  EXPECT_EQ(white[2], (ChatMessage{Role::assistant, "```\ne2e4\n```"}));
  EXPECT_EQ(white[3], (ChatMessage{Role::user, "Your opponent's last move is e7e5.\nWhat is the best move?"}));

  auto with_legal = llm(PlayMode::blindfold, true);
  const auto black = build_blindfold_conversation(with_legal, context({"e2e4"}));
  ASSERT_EQ(black.size(), 2u);
  EXPECT_EQ(black[0].content.substr(0, 89),
            "You are an expert chess player.You are playing a game of chess.You are playing as Black.\n");
  EXPECT_EQ(black[1].content, "Your opponent's last move is e2e4.\n" +
                                  legal_moves_line(Board::start().apply(uci("e2e4"))) + "\nWhat is the best move?");
}

TEST(Blindfold, ReplayReproducesBoard) {
  const auto oracle = chessarena::testing::load_json("chess_oracle.json");
  const auto spec = llm(PlayMode::blindfold, false);
  for (const auto& game : oracle["games"]) {
    PromptContext ctx;
    const auto& moves = game["moves"];
    for (std::size_t ply = 0; ply < moves.size(); ++ply) {
      if (ply % 7 == 0 || ply + 1 == moves.size()) {
        const auto msgs = build_blindfold_conversation(spec, ctx);
        Board replay = Board::start();
        for (std::size_t i = 1; i < msgs.size(); ++i) {
          const auto& c = msgs[i].content;
          if (c.rfind("This is the beginning", 0) == 0) continue;
          std::string mv;
          if (msgs[i].role == Role::assistant) {
            mv = c.substr(4, c.size() - 8);
          } else {
            mv = c.substr(29, c.find('.') - 29);
          }
          replay = replay.apply(uci(mv));
          ASSERT_EQ(i % 2 == 0 ? Role::assistant : Role::user, msgs[i].role) << "turns must alternate";
        }
        ASSERT_EQ(replay.fen(), ctx.board.fen());
        ASSERT_EQ(msgs.back().role, Role::user);
      }
      const auto mv = uci(moves[ply].get<std::string>());
      ctx.moves.push_back(mv);
      ctx.board = ctx.board.apply(mv);
    }
  }
}

TEST(Extract, Examples) {
  const Board start = Board::start();
  auto ok = [&](std::string_view raw, PlayMode mode, std::string_view expected) {
    const auto a = extract_move(raw, mode, start);
    EXPECT_EQ(a.outcome, AttemptOutcome::ok) << raw << " -> " << a.detail;
    if (a.move) EXPECT_EQ(a.move->uci(), expected) << raw;
  };
  ok("<answer>```\ne2e4\n```</answer>", PlayMode::blitz, "e2e4");
  ok("Let me think... d2d4 is fine but <answer>\n```\ne2e4\n```\n</answer>", PlayMode::blitz, "e2e4");
  ok("Thinking about ```d2d4``` and then the final ```\ng1f3\n```", PlayMode::standard, "g1f3");
  ok("... best is ```Nf3```", PlayMode::blitz, "g1f3");
  ok("I would play e2e4, and after that maybe d2d4", PlayMode::blitz, "d2d4");
  ok("My move: Nc3.", PlayMode::blitz, "b1c3");
  ok("<answer>```uci\nE2E4\n```</answer>", PlayMode::blitz, "e2e4");
  ok("<answer>e2-e4</answer>", PlayMode::blitz, "e2e4");
  ok("e2e4", PlayMode::bullet, "e2e4");
  ok("```\ne2e4\n```", PlayMode::bullet, "e2e4");
  ok("<answer>\n```\nNf3\n```\n</answer>", PlayMode::bullet, "g1f3");

  EXPECT_EQ(extract_move("I think e2e4", PlayMode::bullet, start).outcome, AttemptOutcome::forbidden_thinking);
  EXPECT_EQ(extract_move("```\ne2e4\n``` because it controls the center", PlayMode::bullet, start).outcome,
            AttemptOutcome::forbidden_thinking);
  EXPECT_EQ(extract_move("<answer>```\ne2e5\n```</answer>", PlayMode::blitz, start).outcome, AttemptOutcome::illegal_move);
  EXPECT_EQ(extract_move("```Nf6```", PlayMode::blitz, start).outcome, AttemptOutcome::illegal_move);
  EXPECT_EQ(extract_move("I resign.", PlayMode::blitz, start).outcome, AttemptOutcome::parsing_error);
  EXPECT_EQ(extract_move("", PlayMode::blitz, start).outcome, AttemptOutcome::parsing_error);
  EXPECT_EQ(extract_move("", PlayMode::bullet, start).outcome, AttemptOutcome::parsing_error);
  EXPECT_EQ(extract_move("<answer>```\n\n```</answer>", PlayMode::blitz, start).outcome, AttemptOutcome::parsing_error);
  EXPECT_EQ(extract_move("hello", PlayMode::bullet, start).outcome, AttemptOutcome::parsing_error);

  const Board two_knights = Board::parse_fen("4k3/8/8/8/8/8/8/1N2KN2 w - - 0 1");
  EXPECT_EQ(extract_move("```Nd2```", PlayMode::blitz, two_knights).outcome, AttemptOutcome::parsing_error);
}

TEST(Extract, TotalityAndBulletStrictness) {
  chessarena::util::Rng rng(5);
  const std::string alphabet = "abcdefgh12345678NBRQKOx-=+#`<>/answer \n.e2e4";
  const Board start = Board::start();
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const std::size_t n = rng.uniform_index(60);
    for (std::size_t k = 0; k < n; ++k) s += alphabet[rng.uniform_index(alphabet.size())];
    for (auto mode : {PlayMode::bullet, PlayMode::blitz}) {
      MoveAttempt a;
      ASSERT_NO_THROW(a = extract_move(s, mode, start));
      EXPECT_EQ(a.outcome == AttemptOutcome::ok, a.move.has_value());
      EXPECT_NE(a.outcome, AttemptOutcome::transport_error);
      if (mode != PlayMode::bullet) EXPECT_NE(a.outcome, AttemptOutcome::forbidden_thinking);
      if (a.move) EXPECT_TRUE(start.is_legal(a.move->move));
    }
  }
  for (const auto& extra : {"e2e4 e7e5", "e2e4 !", "Answer: e2e4", "e2e4\nbecause"}) {
    EXPECT_EQ(extract_move(extra, PlayMode::bullet, start).outcome, AttemptOutcome::forbidden_thinking) << extra;
  }
}

TEST(Extract, BulletPolicesReasoningField) {
  const Board start = Board::start();
  EXPECT_EQ(extract_move("e2e4", PlayMode::bullet, start, "The centre matters.").outcome,
            AttemptOutcome::forbidden_thinking);
  EXPECT_EQ(extract_move("e2e4", PlayMode::bullet, start, " \n").outcome, AttemptOutcome::ok);
  EXPECT_EQ(extract_move("e2e4", PlayMode::blitz, start, "The centre matters.").outcome, AttemptOutcome::ok);
}

TEST(RequestMove, FirstResponseLegal) {
  auto chat = std::make_shared<ScriptedChat>(std::vector<ScriptedChat::Reply>{"<answer>```\ne2e4\n```</answer>"});
  LlmPlayer p(llm(PlayMode::blitz, true), chat, no_wait());
  const auto d = p.request_move(context({}));
  ASSERT_TRUE(d.move);
  EXPECT_EQ(*d.move, uci("e2e4"));
  EXPECT_EQ(d.attempts.size(), 1u);
  ASSERT_EQ(chat->requests.size(), 1u);
  EXPECT_EQ(chat->requests[0].messages.size(), 2u);
  EXPECT_EQ(chat->requests[0].model, "test-model");
  EXPECT_DOUBLE_EQ(chat->requests[0].temperature, 0.2);
  EXPECT_DOUBLE_EQ(chat->requests[0].top_p, 1.0);
  EXPECT_EQ(chat->requests[0].max_tokens, 4096);
  EXPECT_FALSE(d.prompt_digest.empty());
}

TEST(RequestMove, FiveFailuresForfeit) {
  auto chat = std::make_shared<ScriptedChat>(std::vector<ScriptedChat::Reply>{}, "<answer>```\ne2e5\n```</answer>");
  LlmPlayer p(llm(PlayMode::blitz, false), chat, no_wait());
  const auto d = p.request_move(context({}));
  EXPECT_TRUE(d.forfeit());
  ASSERT_EQ(d.attempts.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(d.attempts[i].index, i + 1);
    EXPECT_EQ(d.attempts[i].outcome, AttemptOutcome::illegal_move);
  }
  ASSERT_EQ(chat->requests.size(), 5u);
  const auto& last = chat->requests[4].messages;
  ASSERT_EQ(last.size(), 2u + 2 * 4);
  EXPECT_EQ(last[2].role, Role::assistant);
  EXPECT_EQ(last[3], (ChatMessage{Role::user, corrective_message(FailureKind::illegal_move)}));
}

TEST(RequestMove, RecoversAfterCorrection) {
  auto chat = std::make_shared<ScriptedChat>(std::vector<ScriptedChat::Reply>{"I like it.", "I think e2e4", "e2e4"});
  LlmPlayer p(llm(PlayMode::bullet, false), chat, no_wait());
  const auto d = p.request_move(context({}));
  ASSERT_TRUE(d.move);
  ASSERT_EQ(d.attempts.size(), 3u);
  EXPECT_EQ(d.attempts[0].outcome, AttemptOutcome::forbidden_thinking);
  EXPECT_EQ(d.attempts[1].outcome, AttemptOutcome::forbidden_thinking);
  EXPECT_EQ(chat->requests[2].messages.back().content, corrective_message(FailureKind::forbidden_thinking));
}

TEST(RequestMove, TransportErrors) {
  {
    auto chat = std::make_shared<ScriptedChat>(std::vector<ScriptedChat::Reply>{
        transport_error("timeout", false), "<answer>```\ne2e4\n```</answer>"});
    LlmPlayer p(llm(PlayMode::blitz, false), chat, no_wait());
    const auto d = p.request_move(context({}));
    ASSERT_TRUE(d.move);
    EXPECT_EQ(d.attempts.size(), 1u) << "one network retry inside the attempt";
  }
  {
    auto chat = std::make_shared<ScriptedChat>(std::vector<ScriptedChat::Reply>{
        transport_error("503", false), transport_error("503", false), "```e2e4```"});
    LlmPlayer p(llm(PlayMode::blitz, false), chat, no_wait());
    const auto d = p.request_move(context({}));
    ASSERT_EQ(d.attempts.size(), 2u);
    EXPECT_EQ(d.attempts[0].outcome, AttemptOutcome::transport_error);
    EXPECT_EQ(chat->requests[2].messages.size(), 2u) << "no corrective message after a transport failure";
  }
  {
    auto chat = std::make_shared<ScriptedChat>(std::vector<ScriptedChat::Reply>{transport_error("401", true, 401)});
    LlmPlayer p(llm(PlayMode::blitz, false), chat, no_wait());
    EXPECT_THROW(p.request_move(context({})), game_aborted);
  }
  {
    std::vector<ScriptedChat::Reply> down(10, transport_error("down", false));
    auto chat = std::make_shared<ScriptedChat>(down);
    LlmPlayer p(llm(PlayMode::blitz, false), chat, no_wait());
    EXPECT_THROW(p.request_move(context({})), game_aborted);
  }
}

TEST(RandomPlayer, UniformAndDeterministic) {
  const Board start = Board::start();
  std::map<std::string, int> counts;
  chessarena::util::Rng rng(77);
  for (int i = 0; i < 10000; ++i) ++counts[random_player_move(start, rng).uci()];
  ASSERT_EQ(counts.size(), 20u);
  double chi2 = 0;
  for (const auto& [m, c] : counts) chi2 += std::pow(c - 500.0, 2) / 500.0;
  // chi-square critical value, 19 degrees of freedom, alpha 0.01
  EXPECT_LT(chi2, 36.191);

  PlayerSpec spec;
  spec.id = "random";
  RandomPlayer a(spec, 9);
  RandomPlayer b(spec, 9);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(a.request_move(context({})).move, b.request_move(context({})).move);

  const Board forced = Board::parse_fen("k7/8/8/8/8/8/1q6/K7 w - - 0 1");
  EXPECT_EQ(random_player_move(forced, rng), uci("a1b2"));

  const auto oracle = chessarena::testing::load_json("chess_oracle.json");
  int positions = 0;
  for (const auto& game : oracle["games"]) {
    Board b2 = Board::start();
    for (const auto& m : game["moves"]) {
      if (positions < 500) {
        EXPECT_TRUE(b2.is_legal(random_player_move(b2, rng)));
        ++positions;
      }
      b2 = b2.apply(uci(m.get<std::string>()));
    }
  }
  EXPECT_EQ(positions, 500);
}

TEST(PlayerSpecJson, StrictParsing) {
  const auto spec = player_spec_from_json(nlohmann::json::parse(R"({
    "id": "gpt", "kind": "llm_api", "mode": "bullet", "legal_moves": true,
    "model": {"endpoint": "https://api.example.com/v1/chat/completions", "name": "gpt-x", "api_key_env": "EXAMPLE_KEY"}
  })"));
  EXPECT_EQ(spec.mode, PlayMode::bullet);
  EXPECT_EQ(spec.model.effective_max_tokens(), 4096);
  EXPECT_DOUBLE_EQ(spec.model.temperature, 0.2);
  const auto thinking = player_spec_from_json(nlohmann::json::parse(
      R"({"id":"r1","kind":"llm_api","mode":"standard","model":{"endpoint":"http://x","name":"r1"}})"));
  EXPECT_EQ(thinking.model.effective_max_tokens(), 16384);
  try {
    player_spec_from_json(nlohmann::json::parse(R"({"id":"x","kind":"random","colour":"white"})"));
    FAIL();
  } catch (const chessarena::util::config_error& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  EXPECT_THROW(player_spec_from_json(nlohmann::json::parse(R"({"id":"x","kind":"llm_api"})")),
               chessarena::util::config_error);
  EXPECT_THROW(player_spec_from_json(nlohmann::json::parse(R"({"id":"x","kind":"robot"})")),
               chessarena::util::config_error);
  const auto round = player_spec_from_json(nlohmann::json::parse(player_spec_to_json(spec).dump()));
  EXPECT_EQ(round.model.name, "gpt-x");
  EXPECT_TRUE(round.provide_legal_moves);
}

class HttpChat : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      if (status_ != 200) {
        res.status = status_;
        return;
      }
      res.set_content(
          R"({"choices":[{"message":{"role":"assistant","content":"```e2e4```","reasoning_content":"hmm"}}],)"
          R"("usage":{"prompt_tokens":12,"completion_tokens":3}})",
          "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  httplib::Server server_;
  std::thread thread_;
  int port_{0};
  int status_{200};
  std::string last_body_;
  std::string last_auth_;
};

TEST_F(HttpChat, RoundTrip) {
  auto client = make_http_chat_client(url(), "sk-test", std::chrono::seconds(5));
  const auto resp = client->complete({"m", {{Role::user, "hi"}}, 0.2, 1.0, 4096});
  EXPECT_EQ(resp.content, "```e2e4```");
  EXPECT_EQ(resp.reasoning, "hmm");
  EXPECT_EQ(resp.prompt_tokens, 12);
  EXPECT_EQ(resp.completion_tokens, 3);
  EXPECT_EQ(last_auth_, "Bearer sk-test");
  const auto body = nlohmann::json::parse(last_body_);
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["max_tokens"], 4096);
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.2);
  EXPECT_DOUBLE_EQ(body["top_p"].get<double>(), 1.0);
}

TEST_F(HttpChat, StatusHandling) {
  auto client = make_http_chat_client(url(), "", std::chrono::seconds(5));
  status_ = 401;
  try {
    client->complete({"m", {{Role::user, "hi"}}, 0.2, 1.0, 10});
    FAIL();
  } catch (const transport_error& e) {
    EXPECT_TRUE(e.fatal());
  }
  status_ = 500;
  try {
    client->complete({"m", {{Role::user, "hi"}}, 0.2, 1.0, 10});
    FAIL();
  } catch (const transport_error& e) {
    EXPECT_FALSE(e.fatal());
  }
  auto dead = make_http_chat_client("http://127.0.0.1:1/v1/chat/completions", "", std::chrono::seconds(1));
  EXPECT_THROW(dead->complete({"m", {{Role::user, "hi"}}, 0.2, 1.0, 10}), transport_error);
  EXPECT_THROW(parse_chat_response("{\"choices\":[]}"), transport_error);
}
