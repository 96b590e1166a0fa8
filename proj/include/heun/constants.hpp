#ifndef HEUN_CONSTANTS_HPP
#define HEUN_CONSTANTS_HPP

// Integration-constant route: the admissible Z_n carries k-2 free constants
// C_{1,n} .. C_{k-2,n}, fixed by the roots of y_n through a lower-triangular
// linear system in the elementary symmetric polynomials, or equivalently by a
// closed form in monomial symmetric polynomials of at most two parts.

#include "heun/errors.hpp"
#include "heun/ode.hpp"
#include "heun/poly.hpp"
#include "heun/roots.hpp"
#include "heun/scalar.hpp"
#include "heun/symfunc.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace heun {

template <Scalar S>
struct IntegrationConstants {
  int k = 2;
  int n = 0;
  std::vector<S> values;  ///< values[q - 1] = C_{q,n}, q = 1 .. k-2

  const S& C(int q) const { return values.at(static_cast<std::size_t>(q - 1)); }

  friend bool operator==(const IntegrationConstants&, const IntegrationConstants&) = default;
};

/// Lower-triangular system for C_{1,n} .. C_{k-2,n}; row r-3 is the equation for r = 3 .. k.
template <Scalar S>
struct ConstantsSystem {
  std::vector<std::vector<S>> matrix;
  std::vector<S> rhs;
};

namespace detail {

template <Scalar S>
S fact(long n) {
  return from_big<S>(factorial(n));
}

inline long sign(long p) { return p % 2 == 0 ? 1 : -1; }

template <Scalar S>
void check_shape(const OdeSystem<S>& sys, int n, const RootSet<S>& rs) {
  if (n < 0) throw ShapeError("n must be non-negative");
  if (rs.size() != static_cast<std::size_t>(n))
    throw ShapeError("root set has " + std::to_string(rs.size()) + " roots, expected n = " + std::to_string(n));
  (void)sys;
}

template <Scalar S>
void check_constants(const OdeSystem<S>& sys, const IntegrationConstants<S>& C) {
  if (C.values.size() != static_cast<std::size_t>(sys.k() - 2))
    throw ShapeError("expected " + std::to_string(sys.k() - 2) + " integration constants, got " +
                     std::to_string(C.values.size()));
}

}  // namespace detail

/// Coefficient of v_n after differentiating the equation n + k - 2 times:
/// C(n+k-2, k) X^(k) + C(n+k-2, k-1) Y^(k-1) + C(n+k-2, k-2) Z^(k-2).
/// Vanishes iff a degree-n polynomial solution is admissible at leading order.
template <Scalar S>
S degree_condition(const OdeSystem<S>& sys, const Poly<S>& Z, int n) {
  const long k = sys.k();
  if (Z.degree() > k - 2) throw ShapeError("deg Z exceeds k - 2");
  const long top = n + k - 2;
  return from_big<S>(binomial(top, k) * factorial(k)) * sys.a(k) +
         from_big<S>(binomial(top, k - 1) * factorial(k - 1)) * sys.b(k - 1) +
         from_big<S>(binomial(top, k - 2) * factorial(k - 2)) * Z.coeff(static_cast<std::size_t>(k - 2));
}

/// Z_n = -n(n-1)/(k(k-1)) X'' - n/(k-1) Y' + sum_{l=0}^{k-3} C_{k-l-2,n} z^l / l!
template <Scalar S>
Poly<S> build_zn(const OdeSystem<S>& sys, int n, const IntegrationConstants<S>& C) {
  detail::check_constants(sys, C);
  const long k = sys.k();
  const S nn(static_cast<long long>(n));
  Poly<S> z = derivative(sys.X(), 2) * (-nn * (nn - S{1}) / S(k * (k - 1))) +
              derivative(sys.Y(), 1) * (-nn / S(k - 1));
  for (long l = 0; l <= k - 3; ++l)
    z += Poly<S>::term(C.C(static_cast<int>(k - l - 2)) / detail::fact<S>(l), static_cast<std::size_t>(l));
  return z;
}

/// Same Z_n assembled coefficient by coefficient:
/// c_{k-2} = -n(n-1) a_k - n b_{k-1},
/// c_l = -n(n-1)(l+2)(l+1) a_{l+2} / (k(k-1)) - n(l+1) b_{l+1} / (k-1) + C_{k-l-2,n} / l!.
template <Scalar S>
Poly<S> coefficient_relations(const OdeSystem<S>& sys, int n, const IntegrationConstants<S>& C) {
  detail::check_constants(sys, C);
  const long k = sys.k();
  const S nn(static_cast<long long>(n));
  std::vector<S> c(static_cast<std::size_t>(k - 1), S{0});
  c[k - 2] = -nn * (nn - S{1}) * sys.a(k) - nn * sys.b(k - 1);
  for (long l = 0; l <= k - 3; ++l) {
    const int li = static_cast<int>(l);
    c[l] = -nn * (nn - S{1}) * S((l + 2) * (l + 1)) * sys.a(li + 2) / S(k * (k - 1)) -
           nn * S(l + 1) * sys.b(li + 1) / S(k - 1) + C.C(static_cast<int>(k - l - 2)) / detail::fact<S>(l);
  }
  return Poly<S>(std::move(c));
}

/// Rows r = 3 .. k of the linear system, with coefficients in e_p of the roots only.
template <Scalar S>
ConstantsSystem<S> assemble_constants_system(const OdeSystem<S>& sys, int n, const RootSet<S>& rs) {
  detail::check_shape(sys, n, rs);
  const long k = sys.k();
  const long dim = k - 2;
  ConstantsSystem<S> out;
  out.matrix.assign(static_cast<std::size_t>(std::max(dim, 0L)), std::vector<S>(static_cast<std::size_t>(std::max(dim, 0L)), S{0}));
  out.rhs.assign(static_cast<std::size_t>(std::max(dim, 0L)), S{0});
  if (dim <= 0) return out;

  std::vector<S> e(static_cast<std::size_t>(k) + 1);
  for (long p = 0; p <= k; ++p) e[p] = elementary(rs, static_cast<int>(p));

  const long nl = n;
  const S kk1(k * (k - 1));
  for (long r = 3; r <= k; ++r) {
    auto& row = out.matrix[r - 3];
    S rhs{0};
    for (long p = 0; p <= r - 3; ++p) {
      // C_{r-2-p,n} / (k-r+p)! carries e_p with sign (-1)^p
      const long q = r - 2 - p;
      row[q - 1] = S(detail::sign(p)) * e[p] / detail::fact<S>(k - r + p);

      const long j = r - p - 2;
      const S a_factor = (S(j * (2 * k - r + p + 1) * nl * nl) -
                          S((2 * p * k * k + 2 * k * (r - 2 * p - 2) - j * (j + 1)) * nl) +
                          S(k * (k - 1) * p * (p + 1))) /
                         kk1;
      const S b_factor = S(j * nl - (k - 1) * p) / S(k - 1);
      rhs -= S(detail::sign(p)) *
             (a_factor * sys.a(static_cast<int>(k - r + 2 + p)) + b_factor * sys.b(static_cast<int>(k - r + 1 + p))) *
             e[p];
    }
    rhs -= S(detail::sign(r - 1) * (r - 2)) * (S(2 * nl - r + 1) * sys.a(static_cast<int>(k)) + sys.b(static_cast<int>(k - 1))) *
           e[r - 2];
    out.rhs[r - 3] = rhs;
  }
  return out;
}

/// Forward substitution; throws InternalMismatch on a zero pivot or a nonzero
/// entry above the diagonal.
template <Scalar S>
std::vector<S> forward_substitute(const ConstantsSystem<S>& system) {
  const std::size_t dim = system.rhs.size();
  std::vector<S> x(dim, S{0});
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j)
      if (system.matrix[i][j] != S{0}) throw InternalMismatch("constants system is not lower triangular");
    S acc = system.rhs[i];
    for (std::size_t j = 0; j < i; ++j) acc -= system.matrix[i][j] * x[j];
    if (system.matrix[i][i] == S{0}) throw InternalMismatch("zero pivot in constants system");
    x[i] = acc / system.matrix[i][i];
  }
  return x;
}

/// Integration constants from the roots by solving the triangular system for r = 3, 4, ..., k.
/// For k = 2 there is nothing to solve and the result is empty.
template <Scalar S>
IntegrationConstants<S> solve_constants_system(const OdeSystem<S>& sys, int n, const RootSet<S>& rs) {
  return IntegrationConstants<S>{sys.k(), n, forward_substitute(assemble_constants_system(sys, n, rs))};
}

/// C_{q,n} / (k-2-q)! = - sum_{t=0}^{q-1} [2(n-1) a_{k-t} + b_{k-t-1}] m_(q-t)
///                      - sum_{s=1}^{[q/2]} sum_{t=0}^{q-2s} 2 a_{k-t} m_(q-t-s, s)
///                      - n(n-1) q (2k-q-1) a_{k-q} / (k(k-1)) - n q b_{k-q-1} / (k-1)
template <Scalar S>
IntegrationConstants<S> constants_closed_form(const OdeSystem<S>& sys, int n, const RootSet<S>& rs) {
  detail::check_shape(sys, n, rs);
  const int k = sys.k();
  const S nn(static_cast<long long>(n));
  IntegrationConstants<S> out{k, n, {}};
  for (int q = 1; q <= k - 2; ++q) {
    S acc{0};
    for (int t = 0; t <= q - 1; ++t)
      acc -= (S{2} * (nn - S{1}) * sys.a(k - t) + sys.b(k - t - 1)) * monomial(rs, Partition{q - t});
    for (int s = 1; s <= q / 2; ++s)
      for (int t = 0; t <= q - 2 * s; ++t) acc -= S{2} * sys.a(k - t) * monomial(rs, Partition{q - t - s, s});
    acc -= nn * (nn - S{1}) * S(static_cast<long long>(q) * (2 * k - q - 1)) * sys.a(k - q) /
           S(static_cast<long long>(k) * (k - 1));
    acc -= nn * S(static_cast<long long>(q)) * sys.b(k - q - 1) / S(static_cast<long long>(k - 1));
    out.values.push_back(acc * detail::fact<S>(k - 2 - q));
  }
  return out;
}

/// The explicitly worked-out first three constants (q = 1, 2, 3), each written
/// out term by term. Requires k >= q + 2.
template <Scalar S>
S constants_appendix(const OdeSystem<S>& sys, int n, const RootSet<S>& rs, int q) {
  if (q < 1 || q > 3) throw std::invalid_argument("constants_appendix: q must be 1, 2 or 3");
  detail::check_shape(sys, n, rs);
  const int k = sys.k();
  if (k < q + 2) throw ShapeError("constants_appendix: q = " + std::to_string(q) + " needs k >= " + std::to_string(q + 2));
  const S nn(static_cast<long long>(n));
  const S kk(static_cast<long long>(k));
  const S km1(static_cast<long long>(k - 1));
  auto lead = [&](int shift) { return S{2} * (nn - S{1}) * sys.a(k - shift) + sys.b(k - shift - 1); };
  auto m = [&](Partition p) { return monomial(rs, p); };

  S value{0};
  switch (q) {
    case 1:
      value = -lead(0) * elementary(rs, 1) - S{2} * nn * (nn - S{1}) * sys.a(k - 1) / kk - nn * sys.b(k - 2) / km1;
      break;
    case 2:
      value = -lead(0) * m({2}) - lead(1) * m({1}) - S{2} * sys.a(k) * m({1, 1}) -
              S{2} * nn * (nn - S{1}) * (S{2} * kk - S{3}) * sys.a(k - 2) / (kk * km1) - S{2} * nn * sys.b(k - 3) / km1;
      break;
    default:
      value = -lead(0) * m({3}) - lead(1) * m({2}) - lead(2) * m({1}) - S{2} * sys.a(k) * m({2, 1}) -
              S{2} * sys.a(k - 1) * m({1, 1}) - S{6} * nn * (nn - S{1}) * (kk - S{2}) * sys.a(k - 3) / (kk * km1) -
              S{3} * nn * sys.b(k - 4) / km1;
      break;
  }
  return value * detail::fact<S>(k - 2 - q);
}

}  // namespace heun

#endif  // HEUN_CONSTANTS_HPP
