#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace rsc {

// Malformed fixture or catalog input; carries the source file and the
// 1-based line number of the offending record.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, std::string message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line),
        message_(std::move(message)) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  // The bare description, without the file:line prefix what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string message_;
};

// Sample set that admits no Beta fit by moments (zero variance, or variance
// at or past the mean*(1-mean) bound).
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsc
