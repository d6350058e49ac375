#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace chessarena::engine {

class engine_error : public std::runtime_error {
 public:
  enum class Kind { spawn, handshake_timeout, timeout, crashed, protocol };
  engine_error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Splits a command line on whitespace, honouring single and double quotes.
std::vector<std::string> split_command(std::string_view command);

/// Child process with line-oriented stdin/stdout pipes. stderr is discarded.
class Subprocess {
 public:
  /// Throws engine_error(spawn) when the program cannot be executed.
  explicit Subprocess(const std::vector<std::string>& argv);
  ~Subprocess();

  Subprocess(Subprocess&& other) noexcept;
  Subprocess& operator=(Subprocess&& other) noexcept;
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  /// Throws engine_error(crashed) when the child has closed its stdin.
  void write_line(std::string_view line);

  /// Next line without its terminator; nullopt on timeout. Throws
  /// engine_error(crashed) at end of output.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);

  bool running();

  /// Closes stdin, waits up to `grace`, then kills.
  void terminate(std::chrono::milliseconds grace = std::chrono::milliseconds(500));

  pid_t pid() const noexcept { return pid_; }

 private:
  void close_all() noexcept;

  pid_t pid_{-1};
  int in_fd_{-1};
  int out_fd_{-1};
  std::string buffer_;
  bool eof_{false};
};

}  // namespace chessarena::engine
