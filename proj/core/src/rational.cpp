#include "ahmc/rational.hpp"

#include <cctype>
#include <sstream>

namespace ahmc {

std::string ParseError::format(const std::string& what, int line, int column) {
  if (line <= 0) return what;
  std::ostringstream out;
  out << "line " << line << ", column " << column << ": " << what;
  return out.str();
}

namespace {

bool allDigits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class pow10(unsigned long exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

Rational parseDecimal(std::string_view text) {
  const std::string original(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp = text.substr(e + 1);
    bool expNegative = false;
    if (!exp.empty() && (exp.front() == '-' || exp.front() == '+')) {
      expNegative = exp.front() == '-';
      exp.remove_prefix(1);
    }
    if (!allDigits(exp) || exp.size() > 6) throw ParseError("malformed number '" + original + "'");
    exponent = std::stol(std::string(exp));
    if (expNegative) exponent = -exponent;
    text = text.substr(0, e);
  }

  std::string_view whole = text;
  std::string_view fraction;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    whole = text.substr(0, dot);
    fraction = text.substr(dot + 1);
  }
  if ((whole.empty() && fraction.empty()) || (!whole.empty() && !allDigits(whole)) ||
      (!fraction.empty() && !allDigits(fraction)))
    throw ParseError("malformed number '" + original + "'");

  mpz_class numerator(std::string(whole.empty() ? "0" : whole) + std::string(fraction), 10);
  exponent -= static_cast<long>(fraction.size());

  Rational value(numerator);
  if (exponent > 0) value *= pow10(static_cast<unsigned long>(exponent));
  if (exponent < 0) value /= pow10(static_cast<unsigned long>(-exponent));
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parseRational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational numerator = parseDecimal(text.substr(0, slash));
    Rational denominator = parseDecimal(text.substr(slash + 1));
    if (denominator == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    Rational value = numerator / denominator;
    value.canonicalize();
    return value;
  }
  return parseDecimal(text);
}

std::string toString(const Rational& value) { return value.get_str(); }

std::string toSmtReal(const Rational& value) {
  Rational magnitude = abs(value);
  std::string body;
  if (magnitude.get_den() == 1) {
    body = magnitude.get_num().get_str() + ".0";
  } else {
    body = "(/ " + magnitude.get_num().get_str() + ".0 " + magnitude.get_den().get_str() + ".0)";
  }
  return sgn(value) < 0 ? "(- " + body + ")" : body;
}

double toDouble(const Rational& value) { return value.get_d(); }

}  // namespace ahmc
