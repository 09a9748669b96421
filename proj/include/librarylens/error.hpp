#pragma once

#include <stdexcept>
#include <string>

namespace librarylens {

// Fatal input error (malformed CSV header, undecodable bytes).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Upload exceeded the configured row cap.
class RowLimitError : public ParseError {
 public:
  explicit RowLimitError(std::size_t cap)
      : ParseError("upload exceeds row cap of " + std::to_string(cap)), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConversionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace librarylens
