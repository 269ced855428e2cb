#pragma once

#include <stdexcept>
#include <string>

namespace causelog {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Error with a source location, thrown by the DSL and log parsers.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int col = 0)
      : Error(format(what, line, col)), line_(line), col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  static std::string format(const std::string& what, int line, int col) {
    std::string s = "line " + std::to_string(line);
    if (col > 0) s += ":" + std::to_string(col);
    return s + ": " + what;
  }

  int line_;
  int col_;
};

}  // namespace causelog
