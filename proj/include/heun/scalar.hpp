#ifndef HEUN_SCALAR_HPP
#define HEUN_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace heun {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

// Every computation runs either entirely in Rational (lossless) or entirely in double.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
};

template <class S>
concept Scalar = requires { scalar_traits<S>::exact; };

template <class S>
inline constexpr bool is_exact_v = scalar_traits<S>::exact;

template <Scalar S>
S abs_value(const S& v) {
  return v < S{0} ? S{-v} : v;
}

template <Scalar S>
S ipow(S base, unsigned exponent) {
  S result{1};
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent != 0) base *= base;
  }
  return result;
}

inline BigInt factorial(long n) {
  if (n < 0) throw std::domain_error("factorial of a negative integer");
  BigInt f{1};
  for (long i = 2; i <= n; ++i) f *= i;
  return f;
}

/// C(top, bottom); zero outside 0 <= bottom <= top.
inline BigInt binomial(long top, long bottom) {
  if (top < 0 || bottom < 0 || bottom > top) return BigInt{0};
  bottom = std::min(bottom, top - bottom);
  BigInt c{1};
  for (long i = 1; i <= bottom; ++i) {
    c *= top - bottom + i;
    c /= i;
  }
  return c;
}

template <Scalar S>
S from_big(const BigInt& v) {
  if constexpr (is_exact_v<S>) {
    return Rational{v};
  } else {
    return v.convert_to<double>();
  }
}

template <Scalar To, Scalar From>
To scalar_cast(const From& v) {
  if constexpr (std::same_as<To, From>) {
    return v;
  } else if constexpr (is_exact_v<From>) {
    return v.template convert_to<double>();
  } else {
    return Rational{v};
  }
}

template <Scalar S>
double to_double(const S& v) {
  return scalar_cast<double>(v);
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// "p/q" (or "p" for integers); parse_rational() reads it back.
inline std::string format_rational(const Rational& v) { return v.str(); }

template <Scalar S>
std::string format_scalar(const S& v) {
  if constexpr (is_exact_v<S>) {
    return format_rational(v);
  } else {
    return format_double(v);
  }
}

/// Accepts "p", "p/q" and finite decimals such as "-0.125" or "2.5e-3", exactly.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_rational(text.substr(0, slash));
    auto den = parse_rational(text.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    auto exp_text = text.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto [p, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc{} || p != exp_text.data() + exp_text.size()) fail();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_point = false;
  for (char ch : mantissa) {
    if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if (ch >= '0' && ch <= '9') {
      digits.push_back(ch);
      if (seen_point) ++fraction_digits;
    } else {
      fail();
    }
  }
  if (digits.empty()) fail();
  // a leading zero would make the BigInt parser read octal
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  BigInt num{digits};
  exponent -= fraction_digits;
  Rational value{num};
  BigInt scale = boost::multiprecision::pow(BigInt{10}, static_cast<unsigned>(std::labs(exponent)));
  value = exponent >= 0 ? value * Rational{scale} : value / Rational{scale};
  return negative ? Rational{-value} : value;
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    if (text.find('/') != std::string_view::npos) return parse_rational(text).convert_to<double>();
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

/// Exact mode: equality. Float mode: |a - b| <= tol * max(1, |a|, |b|).
template <Scalar S>
bool scalars_agree(const S& a, const S& b, double tol = 0.0) {
  if constexpr (is_exact_v<S>) {
    return a == b;
  } else {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
  }
}

}  // namespace heun

#endif  // HEUN_SCALAR_HPP
