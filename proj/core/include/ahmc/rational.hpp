#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace ahmc {

/// Exact probabilities and probability expressions.
using Rational = mpq_class;

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  static std::string format(const std::string& what, int line, int column);

  int line_;
  int column_;
};

/// Parses `3`, `0.25`, `-1.5`, `1e-3` or `p/q` into an exact rational.
/// Throws ParseError on anything else.
Rational parseRational(std::string_view text);

/// Lossless decimal/fraction rendering (`1/3`, `7/8`, `0`).
std::string toString(const Rational& value);

/// SMT-LIB real literal, e.g. `1.0`, `(/ 1.0 4.0)`, `(- (/ 3.0 2.0))`.
std::string toSmtReal(const Rational& value);

double toDouble(const Rational& value);

}  // namespace ahmc
