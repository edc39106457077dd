#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace dabc {

/// Base error for every recoverable failure the toolkit reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input file that could not be read or understood. Carries the path so
/// corpus scans can log and continue.
class InputError : public Error {
 public:
  InputError(std::filesystem::path path, const std::string& reason)
      : Error(path.generic_string() + ": " + reason), path_(std::move(path)), reason_(reason) {}

  const std::filesystem::path& path() const noexcept { return path_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::filesystem::path path_;
  std::string reason_;
};

/// Python syntax error with 1-based line/column.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace dabc
