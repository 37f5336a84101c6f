#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ccx::engine {

/// Exact numeric value: an integer or a rational with arbitrary precision.
///
/// Source literals such as `6.5` are read as the exact rational 13/2, so
/// comparisons between any two numbers never round.
class Number {
 public:
  using Rational = boost::multiprecision::cpp_rational;
  using Integer = boost::multiprecision::cpp_int;

  Number() = default;
  Number(std::int64_t value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  explicit Number(Rational value) : value_(std::move(value)) {}

  /// Parses an unsigned decimal literal (`42`, `6.5`). Returns nullopt on
  /// malformed input.
  static std::optional<Number> from_literal(std::string_view text);

  [[nodiscard]] bool is_integer() const;
  [[nodiscard]] std::optional<std::int64_t> to_int64() const;
  [[nodiscard]] const Rational& value() const { return value_; }

  /// Integers print as digits, terminating rationals as decimals and
  /// everything else as `N/D`.
  [[nodiscard]] std::string to_string() const;

  friend Number operator+(const Number& a, const Number& b) { return Number(Rational(a.value_ + b.value_)); }
  friend Number operator-(const Number& a, const Number& b) { return Number(Rational(a.value_ - b.value_)); }
  friend Number operator*(const Number& a, const Number& b) { return Number(Rational(a.value_ * b.value_)); }
  Number operator-() const { return Number(Rational(-value_)); }

  /// Exact division. Throws std::domain_error on a zero divisor.
  friend Number operator/(const Number& a, const Number& b);

  /// Truncating integer division; both operands must be integers.
  static Number int_div(const Number& a, const Number& b);
  /// Modulo with the sign of the divisor; both operands must be integers.
  static Number mod(const Number& a, const Number& b);

  friend bool operator==(const Number& a, const Number& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Number& a, const Number& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Rational value_;
};

}  // namespace ccx::engine
