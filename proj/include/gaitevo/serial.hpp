#pragma once

#include <optional>
#include <string>
#include <sys/types.h>

#include "gaitevo/fitness.hpp"

namespace gaitevo {

struct SerialSettings {
  // Either a device path ("/dev/ttyUSB0") or "exec:<command>" to talk to a
  // subprocess over a pipe pair (how the bundled mock device is driven).
  std::string port;
  int baud = 115200;       // 8N1, applied when the path is a tty
  double timeout_s = 30.0; // per-reply deadline
};

// Line-oriented transport: newline-terminated ASCII, CR tolerated.
class SerialPort {
 public:
  static SerialPort open(const SerialSettings& settings);
  ~SerialPort();

  SerialPort(SerialPort&& other) noexcept;
  SerialPort& operator=(SerialPort&& other) noexcept;
  SerialPort(const SerialPort&) = delete;
  SerialPort& operator=(const SerialPort&) = delete;

  void write_line(const std::string& line);
  // nullopt on deadline expiry; throws ProtocolError if the peer closes.
  std::optional<std::string> read_line(double timeout_s);

 private:
  SerialPort(int read_fd, int write_fd, pid_t child);
  void close_fds();

  int read_fd_ = -1;
  int write_fd_ = -1;
  pid_t child_ = -1;
  std::string buffer_;
};

// Host side of the robot protocol:
//   PING -> PONG                      (handshake, done on construction)
//   PROG <genome text> -> OK | ERR n  (1 parse, 2 invalid program, 3 busy)
//   GO -> DIST <cm> | FALL            (after the device runs and measures)
class SerialEvaluator final : public Evaluator {
 public:
  explicit SerialEvaluator(const SerialSettings& settings);

  std::string name() const override { return "serial"; }
  Evaluation evaluate(const Genome& g) override;

 private:
  std::string exchange(const std::string& request);

  SerialSettings settings_;
  SerialPort port_;
};

}  // namespace gaitevo
