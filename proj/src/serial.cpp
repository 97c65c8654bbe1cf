#include "gaitevo/serial.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string_view>
#include <utility>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <termios.h>
#include <time.h>
#include <unistd.h>

#include "gaitevo/errors.hpp"

namespace gaitevo {

namespace {

double monotonic_now() {
  timespec ts{};
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

speed_t baud_constant(int baud) {
  switch (baud) {
    case 9600: return B9600;
    case 19200: return B19200;
    case 38400: return B38400;
    case 57600: return B57600;
    case 115200: return B115200;
    default:
      throw PortError("unsupported baud rate " + std::to_string(baud));
  }
}

void configure_tty(int fd, int baud) {
  termios tio{};
  if (tcgetattr(fd, &tio) != 0) {
    throw PortError(std::string("tcgetattr: ") + std::strerror(errno));
  }
  cfmakeraw(&tio);
  tio.c_cflag &= ~static_cast<tcflag_t>(CSTOPB | PARENB);  // 8N1
  tio.c_cflag |= CS8 | CLOCAL | CREAD;
  tio.c_cc[VMIN] = 0;
  tio.c_cc[VTIME] = 0;
  const speed_t speed = baud_constant(baud);
  cfsetispeed(&tio, speed);
  cfsetospeed(&tio, speed);
  if (tcsetattr(fd, TCSANOW, &tio) != 0) {
    throw PortError(std::string("tcsetattr: ") + std::strerror(errno));
  }
}

struct Spawned {
  int read_fd;
  int write_fd;
  pid_t pid;
};

Spawned spawn_command(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw PortError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    throw PortError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return Spawned{from_child[0], to_child[1], pid};
}

}  // namespace

SerialPort::SerialPort(int read_fd, int write_fd, pid_t child)
    : read_fd_(read_fd), write_fd_(write_fd), child_(child) {}

SerialPort SerialPort::open(const SerialSettings& settings) {
  constexpr std::string_view kExecPrefix = "exec:";
  if (settings.port.rfind(kExecPrefix, 0) == 0) {
    const Spawned s = spawn_command(settings.port.substr(kExecPrefix.size()));
    return SerialPort(s.read_fd, s.write_fd, s.pid);
  }
  const int fd = ::open(settings.port.c_str(), O_RDWR | O_NOCTTY);
  if (fd < 0) {
    throw PortError("cannot open '" + settings.port + "': " + std::strerror(errno));
  }
  if (isatty(fd)) configure_tty(fd, settings.baud);
  return SerialPort(fd, fd, -1);
}

SerialPort::SerialPort(SerialPort&& other) noexcept
    : read_fd_(std::exchange(other.read_fd_, -1)),
      write_fd_(std::exchange(other.write_fd_, -1)),
      child_(std::exchange(other.child_, -1)),
      buffer_(std::move(other.buffer_)) {}

SerialPort& SerialPort::operator=(SerialPort&& other) noexcept {
  if (this != &other) {
    close_fds();
    read_fd_ = std::exchange(other.read_fd_, -1);
    write_fd_ = std::exchange(other.write_fd_, -1);
    child_ = std::exchange(other.child_, -1);
    buffer_ = std::move(other.buffer_);
  }
  return *this;
}

void SerialPort::close_fds() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  read_fd_ = write_fd_ = -1;
  if (child_ > 0) {
    int status = 0;
    waitpid(child_, &status, 0);  // mock devices exit on stdin EOF
    child_ = -1;
  }
}

SerialPort::~SerialPort() { close_fds(); }

void SerialPort::write_line(const std::string& line) {
  std::string framed = line;
  framed.push_back('\n');
  std::size_t written = 0;
  while (written < framed.size()) {
    const ssize_t n = ::write(write_fd_, framed.data() + written, framed.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("write: ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> SerialPort::read_line(double timeout_s) {
  const double deadline = monotonic_now() + timeout_s;
  for (;;) {
    if (const std::size_t pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const double remaining = deadline - monotonic_now();
    if (remaining <= 0) return std::nullopt;
    pollfd pfd{read_fd_, POLLIN, 0};
    const int pr = poll(&pfd, 1, static_cast<int>(std::ceil(remaining * 1000.0)));
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("poll: ") + std::strerror(errno));
    }
    if (pr == 0) return std::nullopt;
    char chunk[256];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) throw ProtocolError("port closed by peer");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

SerialEvaluator::SerialEvaluator(const SerialSettings& settings)
    : settings_(settings), port_(SerialPort::open(settings)) {
  const std::string reply = exchange("PING");
  if (reply != "PONG") {
    throw ProtocolError("handshake: expected PONG, got '" + reply + "'");
  }
}

std::string SerialEvaluator::exchange(const std::string& request) {
  port_.write_line(request);
  std::optional<std::string> reply = port_.read_line(settings_.timeout_s);
  if (!reply) {
    throw Timeout("no reply to " + request + " within " +
                  std::to_string(settings_.timeout_s) + " s");
  }
  return *reply;
}

Evaluation SerialEvaluator::evaluate(const Genome& g) {
  const std::string prog_reply = exchange("PROG " + format_genome(g));
  if (prog_reply != "OK") {
    int code = 0;
    if (std::sscanf(prog_reply.c_str(), "ERR %d", &code) == 1) {
      throw DeviceNack(code, "device rejected program: " + prog_reply);
    }
    throw ProtocolError("expected OK or ERR after PROG, got '" + prog_reply + "'");
  }

  const std::string go_reply = exchange("GO");
  if (go_reply == "FALL") return Evaluation{0.0, true};
  if (go_reply.rfind("DIST ", 0) == 0) {
    const std::string number = go_reply.substr(5);
    char* end = nullptr;
    const double cm = std::strtod(number.c_str(), &end);
    if (end == number.c_str() + number.size() && !number.empty() && std::isfinite(cm)) {
      return Evaluation{cm, false};
    }
  }
  throw ProtocolError("expected DIST <cm> or FALL after GO, got '" + go_reply + "'");
}

}  // namespace gaitevo
