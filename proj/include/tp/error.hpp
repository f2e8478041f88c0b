#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tp {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input stream. offset is a byte offset (XML) or a 1-based line
// number (line formats), whichever the parser reports.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Binary model/axis file that cannot be read back.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A vector could not be formed because the input carried nothing usable
// (no n-grams, no in-vocabulary tokens, no entities).
class NoInformation : public Error {
 public:
  using Error::Error;
};

// Vectors of incompatible dimension were combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace tp
