#pragma once

#include <stdexcept>
#include <string>

namespace gaitevo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Genome text could not be parsed at all (validation problems are reported
// through ValidationReport instead, see genome.hpp).
struct ParseError : Error {
  enum class Kind { UnknownOpcode, MalformedToken, ValueOutOfRange, WrongTokenCount };

  ParseError(Kind k, int index, const std::string& what)
      : Error(what), kind(k), token_index(index) {}

  Kind kind;
  int token_index;  // -1 when not tied to a single token
};

struct PopulationTooSmall : Error {
  using Error::Error;
};

// Wraps any backend failure with the iteration it happened in.
struct EvaluatorFailure : Error {
  EvaluatorFailure(int iter, const std::string& what)
      : Error("iteration " + std::to_string(iter) + ": " + what), iteration(iter) {}

  int iteration;
};

// The interactive console reached end of input mid-prompt.
struct ConsoleClosed : Error {
  using Error::Error;
};

struct SerialError : Error {
  using Error::Error;
};

struct PortError : SerialError {
  using SerialError::SerialError;
};

struct Timeout : SerialError {
  using SerialError::SerialError;
};

struct ProtocolError : SerialError {
  using SerialError::SerialError;
};

// Device answered `ERR <code>` to a PROG upload.
struct DeviceNack : SerialError {
  DeviceNack(int c, const std::string& what) : SerialError(what), code(c) {}

  int code;
};

struct IoFailure : Error {
  using Error::Error;
};

struct MalformedRecord : Error {
  MalformedRecord(int line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}

  int line;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace gaitevo
