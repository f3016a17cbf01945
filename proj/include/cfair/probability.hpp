#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace cfair {

/// Exact probability in [0, 1]. No floating point is involved anywhere.
class Probability {
 public:
  using Rational = boost::rational<std::int64_t>;

  Probability() = default;
  explicit Probability(Rational value);

  static Probability zero() { return Probability{}; }
  static Probability one() { return Probability{Rational{1}}; }
  static Probability ratio(std::int64_t num, std::int64_t den);

  /// Parses `digit+ ["." digit{1..6}]`. More than six fractional digits is an
  /// error rather than a rounding.
  static Probability parse_decimal(std::string_view text);

  const Rational& value() const noexcept { return value_; }
  std::int64_t numerator() const noexcept { return value_.numerator(); }
  std::int64_t denominator() const noexcept { return value_.denominator(); }

  /// Canonical text: "0", "1", "0.60", "0.125", or "n/d" when the value has
  /// no decimal expansion of at most six digits.
  std::string to_string() const;

  friend bool operator==(const Probability&, const Probability&) = default;
  friend std::strong_ordering operator<=>(const Probability& a, const Probability& b);

 private:
  Rational value_{0};
};

/// |a - b|, itself a probability since both operands lie in [0, 1].
Probability abs_difference(const Probability& a, const Probability& b);

/// True when `text` matches the decimal literal grammar accepted by parse_decimal.
bool is_decimal_literal(std::string_view text);

}  // namespace cfair
