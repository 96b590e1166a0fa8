#ifndef HEUN_ODE_HPP
#define HEUN_ODE_HPP

#include "heun/errors.hpp"
#include "heun/poly.hpp"
#include "heun/scalar.hpp"

#include <string>

namespace heun {

/// The equation family X(z) y'' + Y(z) y' + Z(z) y = 0 with deg X <= k, deg Y <= k - 1.
template <Scalar S>
class OdeSystem {
 public:
  /// Rejects a vanishing z^k coefficient of X unless `allow_degenerate_leading` is set.
  OdeSystem(int k, Poly<S> x, Poly<S> y, bool allow_degenerate_leading = false)
      : k_(k), x_(std::move(x)), y_(std::move(y)) {
    if (k_ < 2) throw ShapeError("k must be at least 2, got " + std::to_string(k_));
    if (x_.degree() > k_) throw ShapeError("deg X = " + std::to_string(x_.degree()) + " exceeds k = " + std::to_string(k_));
    if (y_.degree() > k_ - 1)
      throw ShapeError("deg Y = " + std::to_string(y_.degree()) + " exceeds k - 1 = " + std::to_string(k_ - 1));
    if (!allow_degenerate_leading && x_.coeff(k_) == S{0})
      throw ShapeError("leading coefficient a_k of X vanishes");
  }

  int k() const noexcept { return k_; }
  const Poly<S>& X() const noexcept { return x_; }
  const Poly<S>& Y() const noexcept { return y_; }

  /// a_l, zero outside 0..k
  S a(int l) const { return l < 0 ? S{0} : x_.coeff(static_cast<std::size_t>(l)); }
  /// b_l, zero outside 0..k-1
  S b(int l) const { return l < 0 ? S{0} : y_.coeff(static_cast<std::size_t>(l)); }

  friend bool operator==(const OdeSystem&, const OdeSystem&) = default;

 private:
  int k_;
  Poly<S> x_;
  Poly<S> y_;
};

template <Scalar To, Scalar From>
OdeSystem<To> ode_cast(const OdeSystem<From>& sys) {
  return OdeSystem<To>(sys.k(), poly_cast<To>(sys.X()), poly_cast<To>(sys.Y()), true);
}

/// X y'' + Y y' + Z y. y solves the equation iff the result is the zero polynomial.
template <Scalar S>
Poly<S> ode_residual(const OdeSystem<S>& sys, const Poly<S>& Z, const Poly<S>& y) {
  if (Z.degree() > sys.k() - 2)
    throw ShapeError("deg Z = " + std::to_string(Z.degree()) + " exceeds k - 2 = " + std::to_string(sys.k() - 2));
  return sys.X() * derivative(y, 2) + sys.Y() * derivative(y, 1) + Z * y;
}

}  // namespace heun

#endif  // HEUN_ODE_HPP
