#include "ccx/engine/number.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <stdexcept>

namespace ccx::engine {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::optional<Number> Number::from_literal(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    if (!all_digits(text)) return std::nullopt;
    return Number(Rational(Integer(std::string(text))));
  }
  const auto whole = text.substr(0, dot);
  const auto frac = text.substr(dot + 1);
  if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
  Integer scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  Integer numerator = Integer(std::string(whole)) * scale + Integer(std::string(frac));
  return Number(Rational(numerator, scale));
}

bool Number::is_integer() const { return boost::multiprecision::denominator(value_) == 1; }

std::optional<std::int64_t> Number::to_int64() const {
  if (!is_integer()) return std::nullopt;
  const Integer n = boost::multiprecision::numerator(value_);
  if (n > std::numeric_limits<std::int64_t>::max() || n < std::numeric_limits<std::int64_t>::min()) {
    return std::nullopt;
  }
  return n.convert_to<std::int64_t>();
}

std::string Number::to_string() const {
  const Integer num = boost::multiprecision::numerator(value_);
  Integer den = boost::multiprecision::denominator(value_);
  if (den == 1) return num.str();

  // Terminating iff the denominator has no prime factors besides 2 and 5.
  Integer rest = den;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return num.str() + "/" + den.str();

  const int digits = std::max(twos, fives);
  Integer scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  Integer scaled = num * (scale / den);
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string body = scaled.str();
  if (body.size() <= static_cast<std::size_t>(digits)) {
    body.insert(0, static_cast<std::size_t>(digits) - body.size() + 1, '0');
  }
  body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  return negative ? "-" + body : body;
}

Number operator/(const Number& a, const Number& b) {
  if (b.value_ == 0) throw std::domain_error("division by zero");
  return Number(Number::Rational(a.value_ / b.value_));
}

Number Number::int_div(const Number& a, const Number& b) {
  if (!a.is_integer() || !b.is_integer()) throw std::invalid_argument("integer expected");
  const Integer d = boost::multiprecision::numerator(b.value_);
  if (d == 0) throw std::domain_error("division by zero");
  return Number(Rational(Integer(boost::multiprecision::numerator(a.value_) / d)));
}

Number Number::mod(const Number& a, const Number& b) {
  if (!a.is_integer() || !b.is_integer()) throw std::invalid_argument("integer expected");
  const Integer d = boost::multiprecision::numerator(b.value_);
  if (d == 0) throw std::domain_error("division by zero");
  Integer r = boost::multiprecision::numerator(a.value_) % d;
  if (r != 0 && ((r < 0) != (d < 0))) r += d;
  return Number(Rational(r));
}

}  // namespace ccx::engine
