#include "lithocheck/text_format.hpp"

#include <charconv>

namespace lithocheck {

ParseError::ParseError(std::string source, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

StatementReader::StatementReader(std::string_view text, std::string source)
    : text_(text), source_(std::move(source)) {
  std::string_view all = text_;
  std::size_t line_no = 0;
  while (!all.empty()) {
    ++line_no;
    std::size_t eol = all.find('\n');
    std::string_view line = all.substr(0, eol);
    all = eol == std::string_view::npos ? std::string_view{} : all.substr(eol + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    Statement st;
    st.line = line_no;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      if (i > start) st.tokens.push_back({line.substr(start, i - start), start + 1});
    }
    if (!st.tokens.empty()) statements_.push_back(std::move(st));
  }
  last_line_ = line_no;
}

const Statement& StatementReader::peek() const {
  if (done()) fail_at_end("unexpected end of input");
  return statements_[pos_];
}

const Statement& StatementReader::next() {
  const Statement& st = peek();
  ++pos_;
  return st;
}

void StatementReader::fail(const Statement& st, std::size_t token, const std::string& message) const {
  std::size_t col = token < st.tokens.size() ? st.tokens[token].column
                                             : st.tokens.back().column + st.tokens.back().text.size();
  throw ParseError(source_, st.line, col, message);
}

void StatementReader::fail_at_end(const std::string& message) const {
  throw ParseError(source_, last_line_ + 1, 1, message);
}

void StatementReader::expect_size(const Statement& st, std::size_t n) const {
  if (st.size() < n) fail(st, st.size(), "expected " + std::to_string(n) + " fields");
  if (st.size() > n) fail(st, n, "unexpected trailing field");
}

void StatementReader::expect_min_size(const Statement& st, std::size_t n) const {
  if (st.size() < n) fail(st, st.size(), "expected at least " + std::to_string(n) + " fields");
}

void StatementReader::expect_word(const Statement& st, std::size_t token, std::string_view word) const {
  if (token >= st.size() || st.tokens[token].text != word) fail(st, token, "expected '" + std::string(word) + "'");
}

std::int64_t StatementReader::integer(const Statement& st, std::size_t token) const {
  if (token >= st.size()) fail(st, token, "missing integer");
  std::string_view t = st.tokens[token].text;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size()) fail(st, token, "expected integer, got '" + std::string(t) + "'");
  return v;
}

std::int64_t StatementReader::positive(const Statement& st, std::size_t token) const {
  std::int64_t v = integer(st, token);
  if (v <= 0) fail(st, token, "expected positive integer");
  return v;
}

std::string StatementReader::word(const Statement& st, std::size_t token) const {
  if (token >= st.size()) fail(st, token, "missing field");
  return std::string(st.tokens[token].text);
}

Rect StatementReader::rect(const Statement& st, std::size_t token) const {
  Coord x1 = integer(st, token), y1 = integer(st, token + 1);
  Coord x2 = integer(st, token + 2), y2 = integer(st, token + 3);
  if (x1 == x2 || y1 == y2) fail(st, token, "degenerate rectangle");
  return make_rect(x1, y1, x2, y2);
}

Orientation StatementReader::orientation(const Statement& st, std::size_t token) const {
  auto o = parse_orientation(word(st, token));
  if (!o) fail(st, token, "orientation must be one of N FN FS S");
  return *o;
}

std::string format_rect(const Rect& r) {
  return std::to_string(r.x_lo) + " " + std::to_string(r.y_lo) + " " + std::to_string(r.x_hi) + " " +
         std::to_string(r.y_hi);
}

}  // namespace lithocheck
