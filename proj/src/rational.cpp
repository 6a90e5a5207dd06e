#include "dpspin/rational.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace dpspin {

namespace {

BigInt parse_digits(std::string_view digits, std::string_view original) {
  if (digits.empty()) throw std::invalid_argument("malformed number '" + std::string(original) + "'");
  BigInt value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("malformed number '" + std::string(original) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

BigInt pow10(long long exponent) {
  BigInt result = 1;
  for (long long i = 0; i < exponent; ++i) result *= 10;
  return result;
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (exp_text.empty() || exp_text.size() > 6)
      throw std::invalid_argument("malformed exponent in '" + std::string(original) + "'");
    exponent = parse_digits(exp_text, original).convert_to<long long>();
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty())
    throw std::invalid_argument("malformed number '" + std::string(original) + "'");
  BigInt numerator = int_part.empty() ? BigInt(0) : parse_digits(int_part, original);
  if (!frac_part.empty()) numerator = numerator * pow10(static_cast<long long>(frac_part.size())) +
                                      parse_digits(frac_part, original);
  exponent -= static_cast<long long>(frac_part.size());
  Rational value = exponent >= 0 ? Rational(numerator * pow10(exponent))
                                 : Rational(numerator, pow10(-exponent));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view original = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash), original);
    Rational den = parse_decimal(text.substr(slash + 1), original);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(original) + "'");
    return num / den;
  }
  return parse_decimal(text, original);
}

std::string format_rational(const Rational& value) {
  BigInt num = boost::multiprecision::numerator(value);
  BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();

  // den = 2^a 5^b exactly when the decimal expansion terminates.
  BigInt rest = den;
  unsigned twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return num.str() + "/" + den.str();

  unsigned digits = std::max(twos, fives);
  BigInt scaled = num * pow10(digits) / den;
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return negative ? "-" + s : s;
}

BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  BigInt g = boost::multiprecision::gcd(a, b);
  BigInt r = a / g * b;
  return r < 0 ? BigInt(-r) : r;
}

}  // namespace dpspin
