#include "chessarena/players/extract.hpp"

#include <cstring>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "chessarena/chess/notation.hpp"

namespace chessarena::players {

namespace {

const std::regex& fence_re() {
  static const std::regex re("```([\\s\\S]*?)```");
  return re;
}

const std::regex& uci_token_re() {
  static const std::regex re("(^|[^A-Za-z0-9])([a-h][1-8]-?[a-h][1-8](=?[qrbnQRBN])?)(?![A-Za-z0-9])");
  return re;
}

const std::regex& san_token_re() {
  static const std::regex re(
      "(^|[^A-Za-z0-9])(O-O-O|O-O|0-0-0|0-0|[NBRQK][a-h]?[1-8]?x?[a-h][1-8]|[a-h]x[a-h][1-8](=?[NBRQ])?|[a-h][1-8](=?[NBRQ])?)"
      "[+#]?(?![A-Za-z0-9])");
  return re;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a language tag line ("```uci\n") unless the tag is the only content.
std::string fence_body(const std::string& inner) {
  static const std::regex tagged("^[A-Za-z]+[ \\t]*\\n([\\s\\S]*)$");
  std::smatch m;
  if (std::regex_match(inner, m, tagged) && m[1].str().find_first_not_of(" \t\r\n") != std::string::npos) {
    return m[1].str();
  }
  return inner;
}

std::optional<std::string> last_fenced(const std::string& text) {
  std::optional<std::string> last;
  for (std::sregex_iterator it(text.begin(), text.end(), fence_re()), end; it != end; ++it) last = (*it)[1].str();
  if (last) return fence_body(*last);
  return last;
}

std::optional<std::string> last_answer(const std::string& text) {
  const auto close = text.rfind("</answer>");
  if (close == std::string::npos) return std::nullopt;
  const auto open = text.rfind("<answer>", close);
  if (open == std::string::npos) return std::nullopt;
  return text.substr(open + 8, close - open - 8);
}

std::optional<std::string> last_match(const std::string& text, const std::regex& re) {
  std::optional<std::string> last;
  for (std::sregex_iterator it(text.begin(), text.end(), re), end; it != end; ++it) last = (*it)[2].str();
  return last;
}

std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Strips <answer> tags and code fences; what remains is what the model "said".
std::string strip_wrappers(std::string text) {
  for (const char* tag : {"<answer>", "</answer>"}) {
    for (auto p = text.find(tag); p != std::string::npos; p = text.find(tag)) text.replace(p, std::strlen(tag), " ");
  }
  std::string out;
  auto pos = text.cbegin();
  for (std::sregex_iterator it(text.begin(), text.end(), fence_re()), end; it != end; ++it) {
    out.append(pos, (*it)[0].first);
    out += " " + fence_body((*it)[1].str()) + " ";
    pos = (*it)[0].second;
  }
  out.append(pos, text.cend());
  for (auto p = out.find("```"); p != std::string::npos; p = out.find("```")) out.replace(p, 3, " ");
  return out;
}

MoveAttempt classify(std::string candidate, MoveAttempt a, const chess::Board& board) {
  a.candidate = candidate;
  if (candidate.empty()) {
    a.outcome = AttemptOutcome::parsing_error;
    a.detail = "no move found in response";
    return a;
  }
  try {
    auto tok = chess::parse_move(candidate, board);
    if (!board.is_legal(tok.move)) {
      a.outcome = AttemptOutcome::illegal_move;
      a.detail = "illegal move " + tok.move.uci();
      return a;
    }
    a.outcome = AttemptOutcome::ok;
    a.move = std::move(tok);
  } catch (const chess::MoveParseError& e) {
    a.outcome = e.kind() == chess::MoveParseError::Kind::no_legal_match ? AttemptOutcome::illegal_move
                                                                         : AttemptOutcome::parsing_error;
    a.detail = e.what();
  } catch (const std::exception& e) {
    a.outcome = AttemptOutcome::parsing_error;
    a.detail = e.what();
  }
  return a;
}

}  // namespace

std::string_view to_string(AttemptOutcome o) {
  switch (o) {
    case AttemptOutcome::ok: return "ok";
    case AttemptOutcome::parsing_error: return "parsing_error";
    case AttemptOutcome::illegal_move: return "illegal_move";
    case AttemptOutcome::forbidden_thinking: return "forbidden_thinking";
    case AttemptOutcome::transport_error: return "transport_error";
  }
  return "parsing_error";
}

AttemptOutcome attempt_outcome_from_string(std::string_view s) {
  for (auto o : {AttemptOutcome::ok, AttemptOutcome::parsing_error, AttemptOutcome::illegal_move,
                 AttemptOutcome::forbidden_thinking, AttemptOutcome::transport_error}) {
    if (to_string(o) == s) return o;
  }
  throw std::invalid_argument("unknown attempt outcome '" + std::string(s) + "'");
}

FailureKind failure_kind(AttemptOutcome o) {
  switch (o) {
    case AttemptOutcome::illegal_move: return FailureKind::illegal_move;
    case AttemptOutcome::forbidden_thinking: return FailureKind::forbidden_thinking;
    default: return FailureKind::parsing_error;
  }
}

std::string extract_candidate(std::string_view raw_view) {
  const std::string raw(raw_view);
  if (auto answer = last_answer(raw)) {
    if (auto block = last_fenced(*answer)) return trim(*block);
    return trim(*answer);
  }
  if (auto block = last_fenced(raw)) return trim(*block);
  if (auto uci = last_match(raw, uci_token_re())) return *uci;
  if (auto san = last_match(raw, san_token_re())) return *san;
  return {};
}

std::optional<std::string> answer_block(std::string_view raw_view) {
  const std::string raw(raw_view);
  auto answer = last_answer(raw);
  if (!answer) return std::nullopt;
  auto block = last_fenced(*answer);
  if (!block) return std::nullopt;
  return trim(*block);
}

MoveAttempt extract_move(std::string_view raw, PlayMode mode, const chess::Board& board, std::string_view reasoning) {
  MoveAttempt a;
  a.raw = std::string(raw);
  try {
    if (mode == PlayMode::bullet) {
      if (!trim(reasoning).empty()) {
        a.outcome = AttemptOutcome::forbidden_thinking;
        a.detail = "response carries reasoning text";
        return a;
      }
      const auto w = words(strip_wrappers(a.raw));
      if (w.size() > 1) {
        a.outcome = AttemptOutcome::forbidden_thinking;
        a.detail = "response has " + std::to_string(w.size()) + " tokens";
        return a;
      }
      return classify(w.empty() ? std::string() : w.front(), std::move(a), board);
    }
    std::string candidate = extract_candidate(a.raw);
    // A fenced or tagged block may still hold prose; read the move from it.
    if (words(candidate).size() > 1) {
      if (auto uci = last_match(candidate, uci_token_re())) {
        candidate = *uci;
      } else if (auto san = last_match(candidate, san_token_re())) {
        candidate = *san;
      }
    }
    return classify(std::move(candidate), std::move(a), board);
  } catch (const std::exception& e) {
    a.outcome = AttemptOutcome::parsing_error;
    a.detail = e.what();
    return a;
  }
}

nlohmann::ordered_json attempt_to_json(const MoveAttempt& a) {
  nlohmann::ordered_json j;
  j["index"] = a.index;
  j["outcome"] = to_string(a.outcome);
  if (a.move) j["move"] = a.move->move.uci();
  j["candidate"] = a.candidate;
  if (!a.detail.empty()) j["detail"] = a.detail;
  j["raw"] = a.raw;
  if (a.reasoning) j["reasoning"] = *a.reasoning;
  j["prompt_tokens"] = a.prompt_tokens;
  j["completion_tokens"] = a.completion_tokens;
  return j;
}

MoveAttempt attempt_from_json(const nlohmann::json& j) {
  MoveAttempt a;
  a.index = j.at("index").get<int>();
  a.outcome = attempt_outcome_from_string(j.at("outcome").get<std::string>());
  if (j.contains("move")) {
    const auto mv = chess::parse_uci(j["move"].get<std::string>());
    if (!mv) throw std::invalid_argument("bad move in attempt record");
    a.move = chess::MoveToken{*mv, j.value("candidate", mv->uci()), chess::Notation::uci};
  }
  a.candidate = j.value("candidate", "");
  a.detail = j.value("detail", "");
  a.raw = j.value("raw", "");
  if (j.contains("reasoning")) a.reasoning = j["reasoning"].get<std::string>();
  a.prompt_tokens = j.value("prompt_tokens", 0);
  a.completion_tokens = j.value("completion_tokens", 0);
  return a;
}

}  // namespace chessarena::players
