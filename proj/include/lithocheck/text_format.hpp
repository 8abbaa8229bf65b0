#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lithocheck/geometry.hpp"

namespace lithocheck {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column, const std::string& message);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string source_;
  std::size_t line_;
  std::size_t column_;
};

// Thrown when parsed content is well-formed but violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Token {
  std::string_view text;
  std::size_t column = 0;  // 1-based
};

// One non-blank, non-comment line split on whitespace. '#' starts a comment.
struct Statement {
  std::size_t line = 0;  // 1-based
  std::vector<Token> tokens;

  std::string_view keyword() const { return tokens.front().text; }
  std::size_t size() const { return tokens.size(); }
};

// Splits text into statements and offers checked accessors that raise
// ParseError with the offending position.
class StatementReader {
 public:
  StatementReader(std::string_view text, std::string source);
  // Tokens view into the owned text.
  StatementReader(const StatementReader&) = delete;
  StatementReader& operator=(const StatementReader&) = delete;

  bool done() const { return pos_ >= statements_.size(); }
  const Statement& peek() const;
  const Statement& next();
  const std::string& source() const { return source_; }

  [[noreturn]] void fail(const Statement& st, std::size_t token, const std::string& message) const;
  [[noreturn]] void fail_at_end(const std::string& message) const;

  void expect_size(const Statement& st, std::size_t n) const;
  void expect_min_size(const Statement& st, std::size_t n) const;
  void expect_word(const Statement& st, std::size_t token, std::string_view word) const;
  std::int64_t integer(const Statement& st, std::size_t token) const;
  std::int64_t positive(const Statement& st, std::size_t token) const;
  std::string word(const Statement& st, std::size_t token) const;
  // Four integer tokens starting at `token`, as a non-degenerate rect.
  Rect rect(const Statement& st, std::size_t token) const;
  Orientation orientation(const Statement& st, std::size_t token) const;

 private:
  std::string text_;
  std::string source_;
  std::vector<Statement> statements_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 0;
};

std::string format_rect(const Rect& r);

}  // namespace lithocheck
