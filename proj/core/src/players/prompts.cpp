#include "chessarena/players/prompts.hpp"

#include <stdexcept>

#include "chessarena/chess/notation.hpp"

namespace chessarena::players {

namespace {

constexpr std::string_view kIntroTail = "You are an expert chess player.You are playing a game of chess.You are playing as ";

constexpr std::string_view kBlindfoldLine =
    "We have the move history of you and your opponent.You must reconstruct the game and analyze the best move on the "
    "chessboard.";

constexpr std::string_view kBody =
    "You must thoroughly analyze the position and play with utmost caution.When you have the advantage, press it "
    "relentlessly and aim for a swift checkmate.Carefully evaluate every move to eliminate any chance of a counterplay "
    "or draw by your opponent.\n"
    "When at a disadvantage, strive to turn the tide and win if possible.If victory is unattainable, exhaust all "
    "possible means to force a draw.\n"
    "Meticulously analyze legal moves, then select the absolute best one. You need to determine whether you are playing "
    "as Black or White.Then, you need to observe the positions of your pieces and choose one of your own pieces to "
    "move; make sure that your move follows the rules of chess.\n"
    "Considering the long-term strategy and short-term tactic.Analyze the position carefully.You may think through the "
    "position and consider multiple candidate moves.\n"
    "When you have decided on your final move, output it in UCI notation (e.g., 'e2e4', 'g8f6' , 'e7e8q') in the "
    "following format:\n"
    "<answer>\n"
    "```\n"
    "<move>\n"
    "```\n"
    "</answer>\n"
    "For example:\n"
    "```\n"
    "e2e4\n"
    "```\n"
    "\n"
    "Reminder of chess rules:\n"
    "    - Bishops move diagonally.\n"
    "    - Rooks move horizontally or vertically.\n"
    "    - Knights jump in an L-shape.\n"
    "    - Queens combine rook and bishop movement.\n"
    "    - Kings move one square in any direction.\n"
    "    - Pawns move forward, capture diagonally, and can promote.\n";

constexpr std::string_view kThinkLine =
    "You can think and reason as much as you want(step by step), but your final move must be formatted exactly as shown "
    "above.";

constexpr std::string_view kBulletLine =
    "You must give me your answer directly without using any other words.I will not accept your answer if there are any "
    "other words.Only output your move content.Your final move must be formatted exactly as shown above.";

constexpr std::string_view kQuestion = "What is the best move?";
constexpr std::string_view kBeginning = "This is the beginning of the game.";

constexpr std::string_view kAnswerFormat =
    "<answer>\n"
    "```\n"
    "<move>\n"
    "```\n"
    "</answer>";

std::string fenced(const std::string& move) { return "```\n" + move + "\n```"; }

std::string opponent_turn(const std::string& move) { return "Your opponent's last move is " + move + "."; }

}  // namespace

std::string_view to_string(ChatMessage::Role r) {
  switch (r) {
    case ChatMessage::Role::system: return "system";
    case ChatMessage::Role::user: return "user";
    case ChatMessage::Role::assistant: return "assistant";
  }
  return "user";
}

ChatMessage::Role role_from_string(std::string_view s) {
  if (s == "system") return ChatMessage::Role::system;
  if (s == "user") return ChatMessage::Role::user;
  if (s == "assistant") return ChatMessage::Role::assistant;
  throw std::invalid_argument("unknown chat role '" + std::string(s) + "'");
}

nlohmann::ordered_json messages_to_json(std::span<const ChatMessage> msgs) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : msgs) arr.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  return arr;
}

std::vector<ChatMessage> messages_from_json(const nlohmann::json& j) {
  std::vector<ChatMessage> out;
  for (const auto& m : j) out.push_back({role_from_string(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
  return out;
}

std::string system_prompt(PlayMode mode, chess::Color color) {
  std::string s(kIntroTail);
  s += chess::color_name(color);
  s += '.';
  s += '\n';
  if (mode == PlayMode::blindfold) {
    s += kBlindfoldLine;
    s += '\n';
  }
  s += kBody;
  s += mode == PlayMode::bullet ? kBulletLine : kThinkLine;
  return s;
}

std::string legal_moves_line(const chess::Board& board) {
  std::string s = "Legal moves in UCI notation: ";
  bool first = true;
  for (const auto& m : board.legal_moves()) {
    if (!first) s += ' ';
    s += m.uci();
    first = false;
  }
  s += '.';
  return s;
}

std::string history_line(const PlayerSpec& spec, const PromptContext& ctx) {
  if (ctx.moves.empty() || spec.history == HistoryFormat::none) return {};
  if (spec.history == HistoryFormat::pgn) {
    return "Move history in PGN notation: " + chess::moves_to_pgn(ctx.start, ctx.moves);
  }
  const std::size_t n = std::min<std::size_t>(ctx.moves.size(), static_cast<std::size_t>(spec.history_plies));
  std::string s = "Move history in UCI notation: ";
  for (std::size_t i = ctx.moves.size() - n; i < ctx.moves.size(); ++i) {
    s += ctx.moves[i].uci();
    s += i + 1 < ctx.moves.size() ? ' ' : '.';
  }
  return s;
}

std::vector<ChatMessage> build_prompt(const PlayerSpec& spec, const PromptContext& ctx) {
  std::string user = "The current FEN: " + ctx.board.fen() + "\n";
  if (auto h = history_line(spec, ctx); !h.empty()) user += h + "\n";
  if (spec.provide_legal_moves) user += legal_moves_line(ctx.board) + "\n";
  user += kQuestion;
  return {{ChatMessage::Role::system, system_prompt(spec.mode, ctx.board.side_to_move())},
          {ChatMessage::Role::user, std::move(user)}};
}

std::vector<ChatMessage> build_blindfold_conversation(const PlayerSpec& spec, const PromptContext& ctx) {
  const chess::Color me = ctx.board.side_to_move();
  std::vector<ChatMessage> msgs{{ChatMessage::Role::system, system_prompt(PlayMode::blindfold, me)}};
  chess::Color mover = ctx.start.side_to_move();
  if (mover == me) msgs.push_back({ChatMessage::Role::user, std::string(kBeginning)});
  for (const auto& mv : ctx.moves) {
    if (mover == me) {
      msgs.push_back({ChatMessage::Role::assistant, fenced(mv.uci())});
    } else {
      msgs.push_back({ChatMessage::Role::user, opponent_turn(mv.uci())});
    }
    mover = chess::opposite(mover);
  }
  auto& last = msgs.back();
  if (last.role != ChatMessage::Role::user) {
    throw std::logic_error("blindfold transcript must end with a user turn");
  }
  if (last.content == kBeginning) {
    if (spec.provide_legal_moves) last.content += "\n" + legal_moves_line(ctx.board);
  } else {
    if (spec.provide_legal_moves) last.content += "\n" + legal_moves_line(ctx.board);
    last.content += "\n";
    last.content += kQuestion;
  }
  return msgs;
}

std::vector<ChatMessage> build_messages(const PlayerSpec& spec, const PromptContext& ctx) {
  return spec.mode == PlayMode::blindfold ? build_blindfold_conversation(spec, ctx) : build_prompt(spec, ctx);
}

std::string corrective_message(FailureKind kind) {
  std::string head;
  switch (kind) {
    case FailureKind::parsing_error:
      head = "Your answer could not be parsed as a chess move.";
      break;
    case FailureKind::illegal_move:
      head = "Your move is illegal in the current position. Choose one of your own pieces and make a legal move.";
      break;
    case FailureKind::forbidden_thinking:
      head = "Your answer contained words other than the move. Give only the move, without any other words.";
      break;
  }
  return head + " Please try again and output your move in UCI notation in the following format:\n" +
         std::string(kAnswerFormat);
}

}  // namespace chessarena::players
