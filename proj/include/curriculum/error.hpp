#pragma once

#include <stdexcept>
#include <string>

namespace curriculum {

// Base for every error raised by the library. Precondition violations on
// plain arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input file was readable but malformed (manifest, JSON, trace).
class ParseError : public Error {
 public:
  using Error::Error;
};

// The external learner broke the line protocol, died, or timed out.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace curriculum
