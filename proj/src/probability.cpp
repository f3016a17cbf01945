#include "cfair/probability.hpp"

#include <cctype>
#include <limits>
#include <string>

#include "cfair/error.hpp"

namespace cfair {
namespace {

constexpr int kMaxFractionDigits = 6;

std::int64_t pow10(int n) {
  std::int64_t r = 1;
  while (n-- > 0) r *= 10;
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Probability::Probability(Rational value) : value_(value) {
  if (value_ < Rational{0} || value_ > Rational{1})
    throw ModelError("probability out of range [0,1]: " + std::to_string(value_.numerator()) + "/" +
                     std::to_string(value_.denominator()));
}

Probability Probability::ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ModelError("probability with zero denominator");
  return Probability{Rational{num, den}};
}

bool is_decimal_literal(std::string_view text) {
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return all_digits(text);
  auto frac = text.substr(dot + 1);
  return all_digits(text.substr(0, dot)) && all_digits(frac) &&
         frac.size() <= static_cast<std::size_t>(kMaxFractionDigits);
}

Probability Probability::parse_decimal(std::string_view text) {
  if (!is_decimal_literal(text)) {
    auto dot = text.find('.');
    if (dot != std::string_view::npos && text.size() - dot - 1 > kMaxFractionDigits)
      throw ModelError("probability literal '" + std::string(text) + "' has more than " +
                       std::to_string(kMaxFractionDigits) + " fractional digits");
    throw ModelError("malformed probability literal '" + std::string(text) + "'");
  }
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  // Anything with more than a handful of integer digits is out of range anyway.
  std::string_view trimmed = whole;
  while (trimmed.size() > 1 && trimmed.front() == '0') trimmed.remove_prefix(1);
  if (trimmed.size() > 1) throw ModelError("probability out of range [0,1]: " + std::string(text));
  std::int64_t den = pow10(static_cast<int>(frac.size()));
  std::int64_t num = (trimmed[0] - '0') * den;
  if (!frac.empty()) num += std::stoll(std::string(frac));
  return Probability{Rational{num, den}};
}

std::string Probability::to_string() const {
  const auto num = value_.numerator();
  const auto den = value_.denominator();
  if (den == 1) return std::to_string(num);
  // Find the shortest power of ten that den divides.
  int digits = 0;
  std::int64_t scale = 1;
  while (digits <= kMaxFractionDigits && scale % den != 0) {
    scale *= 10;
    ++digits;
  }
  if (digits > kMaxFractionDigits) return std::to_string(num) + "/" + std::to_string(den);
  if (digits < 2) {
    digits = 2;
    scale = 100;
  }
  std::int64_t scaled = num * (scale / den);
  std::string frac = std::to_string(scaled % scale);
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  return std::to_string(scaled / scale) + "." + frac;
}

std::strong_ordering operator<=>(const Probability& a, const Probability& b) {
  if (a.value_ < b.value_) return std::strong_ordering::less;
  if (b.value_ < a.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Probability abs_difference(const Probability& a, const Probability& b) {
  auto d = a.value() - b.value();
  return Probability{d < Probability::Rational{0} ? -d : d};
}

}  // namespace cfair
