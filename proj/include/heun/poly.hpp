#ifndef HEUN_POLY_HPP
#define HEUN_POLY_HPP

#include "heun/roots.hpp"
#include "heun/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace heun {

/// Dense univariate polynomial, coefficient i multiplies z^i.
///
/// Trailing zero coefficients are always trimmed, so two polynomials are equal
/// exactly when their coefficient lists are. The zero polynomial has an empty
/// list and degree() == -1.
template <Scalar S>
class Poly {
 public:
  using value_type = S;

  Poly() = default;
  explicit Poly(std::vector<S> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<S> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(const S& v) { return Poly(std::vector<S>{v}); }

  /// c * z^power
  static Poly term(const S& c, std::size_t power) {
    std::vector<S> v(power + 1, S{0});
    v[power] = c;
    return Poly(std::move(v));
  }

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }

  /// Coefficient of z^i; zero above the degree.
  S coeff(std::size_t i) const { return i < c_.size() ? c_[i] : S{0}; }
  S leading() const { return c_.empty() ? S{0} : c_.back(); }
  std::span<const S> coeffs() const noexcept { return c_; }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::fabs(to_double(v)));
    return m;
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), S{0});
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), S{0});
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  Poly& operator*=(const S& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }
  friend Poly operator*(Poly a, const S& s) { return a *= s; }
  friend Poly operator*(const S& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly{};
    std::vector<S> out(a.c_.size() + b.c_.size() - 1, S{0});
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(out));
  }

  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == S{0}) c_.pop_back();
  }

  std::vector<S> c_;
};

template <Scalar To, Scalar From>
Poly<To> poly_cast(const Poly<From>& p) {
  std::vector<To> out;
  out.reserve(p.coeffs().size());
  for (const auto& v : p.coeffs()) out.push_back(scalar_cast<To>(v));
  return Poly<To>(std::move(out));
}

/// Coefficients listed from the highest power down, as typed on a command line.
template <Scalar S>
Poly<S> poly_from_descending(std::span<const S> high_to_low) {
  return Poly<S>(std::vector<S>(high_to_low.rbegin(), high_to_low.rend()));
}

template <Scalar S>
Poly<S> derivative(const Poly<S>& p, unsigned order = 1) {
  auto c = p.coeffs();
  if (order == 0) return p;
  if (c.size() <= order) return Poly<S>{};
  std::vector<S> out(c.size() - order);
  for (std::size_t i = order; i < c.size(); ++i) {
    // falling factorial i (i-1) ... (i-order+1)
    S f{1};
    for (std::size_t j = 0; j < order; ++j) f *= S(static_cast<long long>(i - j));
    out[i - order] = c[i] * f;
  }
  return Poly<S>(std::move(out));
}

template <Scalar S>
S eval(const Poly<S>& p, const S& z) {
  auto c = p.coeffs();
  S acc{0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

/// Monic product of (z - z_i); the empty set gives the constant 1.
template <Scalar S>
Poly<S> poly_from_roots(const RootSet<S>& rs) {
  std::vector<S> c{S{1}};
  for (const auto& root : rs) {
    std::vector<S> next(c.size() + 1, S{0});
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= root * c[i];
    }
    c = std::move(next);
  }
  return Poly<S>(std::move(c));
}

template <Scalar S>
std::string to_string(const Poly<S>& p) {
  if (p.is_zero()) return "0";
  std::string out;
  auto c = p.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] == S{0}) continue;
    if (!out.empty()) out += " + ";
    out += "(" + format_scalar(c[i]) + ")";
    if (i > 0) out += "*z";
    if (i > 1) out += "^" + std::to_string(i);
  }
  return out;
}

}  // namespace heun

#endif  // HEUN_POLY_HPP
