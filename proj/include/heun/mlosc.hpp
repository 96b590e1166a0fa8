#ifndef HEUN_MLOSC_HPP
#define HEUN_MLOSC_HPP

// Quasi-exactly solvable extension of the Mathews-Lakshmanan oscillator,
//   H = -(1 + l x^2) d^2/dx^2 - l x d/dx + l A - l A / (1 + l x^2) + l sum_{k=1}^{4} B_k (1 + l x^2)^k,
// reduced with z = 1 / (1 + l x^2) and psi = x^p z^a exp(-b1/z - b2/z^2) y(z) to a k = 4
// polynomial-coefficient equation. Only the m = 2 (four B parameters) case is supported.

#include "heun/errors.hpp"
#include "heun/fba.hpp"
#include "heun/ode.hpp"
#include "heun/poly.hpp"
#include "heun/roots.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace heun {

struct MLParams {
  double lambda = 1.0;
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  int p = 0;  ///< parity label, psi(-x) = (-1)^p psi(x)

  void validate() const {
    if (lambda == 0.0) throw std::invalid_argument("lambda must be nonzero");
    if (p != 0 && p != 1) throw std::invalid_argument("parity p must be 0 or 1");
  }

  /// Half-width of the coordinate range; infinite when lambda > 0.
  double x_limit() const {
    return lambda > 0 ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(std::fabs(lambda));
  }

  bool in_domain(double x) const { return std::fabs(x) < x_limit(); }

  friend bool operator==(const MLParams&, const MLParams&) = default;
};

struct MLBParams {
  double B2 = 0.0;
  double B3 = 0.0;
  double B4 = 0.0;
};

struct MLEigenpair {
  int n = 0;
  int p = 0;
  double energy = 0.0;
  double epsilon = 0.0;  ///< energy = lambda (epsilon + A)
  double A = 0.0;
  double B1 = 0.0;
  std::optional<double> root;  ///< z_1, present iff n = 1
  /// |Y(z_1) / X(z_1)|; absent for n = 0 or when z_1 sits on a zero of X
  std::optional<double> bethe_residual;
  bool normalizable = false;
  std::string normalizability_condition;
  /// For lambda > 0 the physical range of z is (0, 1]; recorded, not enforced.
  bool root_in_unit_interval = true;
};

struct CubicRoots {
  std::vector<double> roots;     ///< simple real roots, ascending
  std::vector<double> repeated;  ///< real roots of multiplicity > 1
};

/// (4a + 3) z^3 - 2(2a - 2b1 + 1 - p) z^2 - 4(b1 - 2b2) z - 8 b2, highest power first.
inline std::array<double, 4> ml_cubic(const MLParams& prm) {
  const double shifted = 2 * prm.a - 2 * prm.b1 + 1 - prm.p;
  return {4 * prm.a + 3, -2 * shifted, -4 * (prm.b1 - 2 * prm.b2), -8 * prm.b2};
}

/// The k = 4 equation obtained after the change of variable and gauge transformation.
/// Independent of lambda, which only sets the energy scale.
inline OdeSystem<double> ml_map_to_ode(const MLParams& prm, int m = 2) {
  prm.validate();
  if (m != 2) throw UnsupportedOrder("only the m = 2 (k = 4) oscillator extension is supported, got m = " + std::to_string(m));
  Poly<double> x{0.0, 0.0, 0.0, -4.0, 4.0};
  const double shifted = 2 * prm.a - 2 * prm.b1 + 1 - prm.p;
  Poly<double> y{-16 * prm.b2, -8 * (prm.b1 - 2 * prm.b2), -4 * shifted, 2 * (4 * prm.a + 3)};
  return OdeSystem<double>(4, std::move(x), std::move(y));
}

inline MLBParams ml_b_params(const MLParams& prm) {
  return MLBParams{4 * (prm.b1 * prm.b1 + 2 * prm.b2 * (2 * prm.a - 2 * prm.b1 - 2 - prm.p)),
                   16 * prm.b2 * (prm.b1 - prm.b2), 16 * prm.b2 * prm.b2};
}

/// c_2, c_1, c_0 of the reduced equation in terms of A, B1 and epsilon.
inline Poly<double> ml_z_coefficients(const MLParams& prm, double A, double B1, double epsilon) {
  const double a = prm.a, b1 = prm.b1, b2 = prm.b2, p = prm.p;
  return Poly<double>{B1 - 4 * b1 * (2 * a - b1 - 1 - p) + 4 * b2 * (4 * a - 3),
                      -4 * a * a + 8 * a * b1 + 4 * a * p - 2 * b1 - p - epsilon, 2 * a * (2 * a + 1) - A};
}

struct MLEnergy {
  double A = 0.0;
  double B1 = 0.0;
  double epsilon = 0.0;
  double E = 0.0;
};

/// Inverts ml_z_coefficients: reads A, B1, epsilon (and E) off a Z produced by the general machinery.
inline MLEnergy ml_energy_from_ode(const MLParams& prm, const Poly<double>& Z) {
  const double a = prm.a, b1 = prm.b1, b2 = prm.b2, p = prm.p;
  MLEnergy out;
  out.A = 2 * a * (2 * a + 1) - Z.coeff(2);
  out.epsilon = -4 * a * a + 8 * a * b1 + 4 * a * p - 2 * b1 - p - Z.coeff(1);
  out.B1 = Z.coeff(0) + 4 * b1 * (2 * a - b1 - 1 - p) - 4 * b2 * (4 * a - 3);
  out.E = prm.lambda * (out.epsilon + out.A);
  return out;
}

namespace detail {

inline void set_normalizability(const MLParams& prm, MLEigenpair& pair) {
  if (prm.lambda > 0) {
    pair.normalizable = prm.b2 > 0;
    pair.normalizability_condition = "b2 > 0 (lambda > 0)";
  } else {
    const double bound = pair.n == 0 ? 0.25 : -0.75;
    pair.normalizable = prm.a < bound;
    pair.normalizability_condition = pair.n == 0 ? "a < 1/4 (lambda < 0)" : "a < -3/4 (lambda < 0)";
  }
}

inline double cubic_value(const std::array<double, 4>& c, double z) { return ((c[0] * z + c[1]) * z + c[2]) * z + c[3]; }

inline double polish_cubic_root(const std::array<double, 4>& c, double z) {
  for (int i = 0; i < 4; ++i) {
    const double f = cubic_value(c, z);
    const double df = (3 * c[0] * z + 2 * c[1]) * z + c[2];
    if (f == 0.0 || df == 0.0) break;
    const double next = z - f / df;
    if (!(std::fabs(cubic_value(c, next)) < std::fabs(f))) break;
    z = next;
  }
  return z;
}

}  // namespace detail

/// Ground-type eigenpair, y = 1: A = 2a(2a+1), B1 = 4b1(2a - b1 - 1 - p) - 4b2(4a - 3),
/// E = lambda (8ab1 + 4ap + 2a - 2b1 - p).
inline MLEigenpair ml_spectrum_n0(const MLParams& prm) {
  prm.validate();
  const double a = prm.a, b1 = prm.b1, b2 = prm.b2, p = prm.p;
  MLEigenpair pair;
  pair.n = 0;
  pair.p = prm.p;
  pair.A = 2 * a * (2 * a + 1);
  pair.B1 = 4 * b1 * (2 * a - b1 - 1 - p) - 4 * b2 * (4 * a - 3);
  pair.energy = prm.lambda * (8 * a * b1 + 4 * a * p + 2 * a - 2 * b1 - p);
  pair.epsilon = pair.energy / prm.lambda - pair.A;
  detail::set_normalizability(prm, pair);
  return pair;
}

/// All real roots of c3 z^3 + c2 z^2 + c1 z + c0.
///
/// One real root (discriminant (v/2)^2 + (u/3)^3 > 0) uses the radical formula on the
/// depressed cubic t^3 + u t + v; three real roots use the trigonometric form. Each root
/// gets a few Newton polishing steps. Roots closer than `tol` are merged and reported as repeated.
inline CubicRoots cardano_real_root(double c3, double c2, double c1, double c0, double tol = 1e-7) {
  if (c3 == 0.0) throw std::invalid_argument("cardano_real_root: leading coefficient is zero");
  const std::array<double, 4> c{c3, c2, c1, c0};
  const double b = c2 / c3, cc = c1 / c3, d = c0 / c3;
  const double shift = -b / 3.0;
  const double u = cc - b * b / 3.0;
  const double v = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
  const double half_v = v / 2.0, third_u = u / 3.0;
  const double disc = half_v * half_v + third_u * third_u * third_u;
  const double scale = std::max({half_v * half_v, std::fabs(third_u * third_u * third_u), 1e-300});

  std::vector<double> t;
  if (std::fabs(disc) <= 1e-12 * scale) {
    const double w = std::cbrt(-half_v);
    t = {2.0 * w, -w, -w};
  } else if (disc > 0) {
    const double sq = std::sqrt(disc);
    t = {std::cbrt(-half_v + sq) + std::cbrt(-half_v - sq)};
  } else {
    const double r = 2.0 * std::sqrt(-third_u);
    const double arg = std::clamp(3.0 * v / (2.0 * u) * std::sqrt(-3.0 / u), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int j = 0; j < 3; ++j) t.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * j / 3.0));
  }

  std::vector<double> z;
  for (double ti : t) z.push_back(detail::polish_cubic_root(c, ti + shift));
  std::sort(z.begin(), z.end());

  CubicRoots out;
  for (std::size_t i = 0; i < z.size();) {
    std::size_t j = i + 1;
    while (j < z.size() && z[j] - z[i] < tol) ++j;
    if (j - i > 1) {
      out.repeated.push_back(z[i]);
    } else {
      out.roots.push_back(z[i]);
    }
    i = j;
  }
  return out;
}

/// The principal root written with the explicit shift and u, v of the oscillator cubic,
/// valid when (v/2)^2 + (u/3)^3 >= 0.
inline std::optional<double> ml_cardano_principal_root(const MLParams& prm) {
  const double lead = 4 * prm.a + 3;
  const double s = 2 * prm.a - 2 * prm.b1 + 1 - prm.p;
  const double u = 4.0 / lead * (-prm.b1 + 2 * prm.b2 - s * s / (3 * lead));
  const double v = -8.0 / lead *
                   (prm.b2 + 2.0 / 27.0 * s * s * s / (lead * lead) + s * (prm.b1 - 2 * prm.b2) / (3 * lead));
  const double disc = (v / 2) * (v / 2) + (u / 3) * (u / 3) * (u / 3);
  if (disc < 0) return std::nullopt;
  const double sq = std::sqrt(disc);
  return 2 * s / (3 * lead) + std::cbrt(-v / 2 + sq) + std::cbrt(-v / 2 - sq);
}

struct MLSpectrumN1 {
  std::vector<MLEigenpair> pairs;      ///< one per simple real cubic root, ascending in z_1
  std::vector<double> degenerate_roots;  ///< repeated roots, suppressed
};

/// y = z - z_1 with z_1 a real root of the oscillator cubic (which is Y(z)/2):
/// A = (2a+2)(2a+3), E = lambda [8ab1 + 4ap + 2a + 6b1 + 3p + 2 + 2(4a+3) z_1].
inline MLSpectrumN1 ml_spectrum_n1(const MLParams& prm) {
  prm.validate();
  const double a = prm.a, b1 = prm.b1, b2 = prm.b2, p = prm.p;
  const double lead = 4 * a + 3;
  if (lead == 0.0) throw ShapeError("4a + 3 vanishes; the n = 1 cubic degenerates");
  const auto cubic = ml_cubic(prm);
  const auto roots = cardano_real_root(cubic[0], cubic[1], cubic[2], cubic[3]);
  const auto sys = ml_map_to_ode(prm);

  MLSpectrumN1 out;
  out.degenerate_roots = roots.repeated;
  for (double z1 : roots.roots) {
    MLEigenpair pair;
    pair.n = 1;
    pair.p = prm.p;
    pair.root = z1;
    pair.A = (2 * a + 2) * (2 * a + 3);
    pair.B1 = -2 * lead * z1 * z1 + 4 * (2 * a - 2 * b1 + 1 - p) * z1 + 4 * b1 * (2 * a - b1 + 1 - p) -
              4 * b2 * (4 * a + 1);
    pair.energy = prm.lambda * (8 * a * b1 + 4 * a * p + 2 * a + 6 * b1 + 3 * p + 2 + 2 * lead * z1);
    pair.epsilon = pair.energy / prm.lambda - pair.A;
    const double xz = eval(sys.X(), z1);
    if (std::fabs(xz) > 1e-10) pair.bethe_residual = std::fabs(eval(sys.Y(), z1) / xz);
    pair.root_in_unit_interval = z1 > 0.0 && z1 <= 1.0;
    detail::set_normalizability(prm, pair);
    out.pairs.push_back(pair);
  }
  return out;
}

/// Unnormalized eigenfunction (proportionality constant 1):
/// x^p (1 + l x^2)^(-a-n) [1 - z_1 (1 + l x^2)]^n exp(-l (b1 + 2 b2) x^2 - l^2 b2 x^4).
inline double ml_wavefunction(const MLParams& prm, const MLEigenpair& pair, double x) {
  if (!prm.in_domain(x)) throw DomainViolation("x = " + format_double(x) + " lies outside the coordinate range");
  const double s = 1.0 + prm.lambda * x * x;
  double psi = (prm.p == 1 ? x : 1.0) * std::pow(s, -prm.a - pair.n) *
               std::exp(-prm.lambda * (prm.b1 + 2 * prm.b2) * x * x - prm.lambda * prm.lambda * prm.b2 * x * x * x * x);
  if (pair.n == 1) psi *= 1.0 - pair.root.value() * s;
  return psi;
}

namespace detail {

struct Derivatives {
  double d1;
  double d2;
};

/// Five-point central differences, Richardson-extrapolated over h, h/2, h/4.
template <class F>
Derivatives central_derivatives(const F& f, double x, double h) {
  auto level = [&](double step) {
    const double fm2 = f(x - 2 * step), fm1 = f(x - step), f0 = f(x), fp1 = f(x + step), fp2 = f(x + 2 * step);
    return Derivatives{(fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * step),
                       (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * step * step)};
  };
  std::array<Derivatives, 3> t{level(h), level(h / 2), level(h / 4)};
  // eliminate the h^4 then the h^6 error terms
  auto combine = [](double coarse, double fine, double factor) { return (factor * fine - coarse) / (factor - 1); };
  const double a1 = combine(t[0].d1, t[1].d1, 16), b1 = combine(t[1].d1, t[2].d1, 16);
  const double a2 = combine(t[0].d2, t[1].d2, 16), b2 = combine(t[1].d2, t[2].d2, 16);
  return Derivatives{combine(a1, b1, 64), combine(a2, b2, 64)};
}

/// Rough magnitude of |d/dx log psi| at x, used to size the difference step.
inline double log_derivative_scale(const MLParams& prm, const MLEigenpair& pair, double x) {
  const double ax = std::fabs(x);
  const double l = std::fabs(prm.lambda);
  double s = 1.0 + 2 * l * std::fabs(prm.b1 + 2 * prm.b2) * ax + 4 * l * l * std::fabs(prm.b2) * ax * ax * ax +
             2 * l * std::fabs(prm.a + pair.n) * ax / std::fabs(1.0 + prm.lambda * x * x);
  if (prm.p == 1 && ax > 0) s += 1.0 / ax;
  if (!prm.in_domain(x)) return s;
  const double edge = prm.x_limit() - ax;
  if (std::isfinite(edge) && edge > 0) s = std::max(s, 1.0 / edge);
  return s;
}

}  // namespace detail

/// psi(x + d) / psi(x) with every factor's increment formed directly, so the ratio carries
/// rounding error near machine epsilon even where psi itself loses digits in exp and pow.
/// Not finite where psi(x) = 0.
inline double ml_wavefunction_ratio(const MLParams& prm, const MLEigenpair& pair, double x, double d) {
  if (!prm.in_domain(x) || !prm.in_domain(x + d))
    throw DomainViolation("x = " + format_double(x + d) + " lies outside the coordinate range");
  const double l = prm.lambda;
  const double s = 1.0 + l * x * x;
  const double ds = l * d * (2 * x + d);  // s(x + d) - s(x)
  const double quartic = d * (((4 * x + d) * d + 6 * x * x) * d + 4 * x * x * x);  // (x + d)^4 - x^4
  double r = std::exp(-(prm.a + pair.n) * std::log1p(ds / s) - (prm.b1 + 2 * prm.b2) * ds - l * l * prm.b2 * quartic);
  if (prm.p == 1) r *= 1.0 + d / x;
  if (pair.n == 1) r *= 1.0 - pair.root.value() * ds / (1.0 - pair.root.value() * s);
  return r;
}

/// [-(1 + l x^2) d^2/dx^2 - l x d/dx + V(x) - E] psi at x, with psi'' and psi' taken by
/// finite differences of the wavefunction formula (through ml_wavefunction_ratio).
inline double schrodinger_residual(const MLParams& prm, const MLEigenpair& pair, double x) {
  if (!prm.in_domain(x)) throw DomainViolation("x = " + format_double(x) + " lies outside the coordinate range");
  const double h = 0.1 / detail::log_derivative_scale(prm, pair, x);
  if (!prm.in_domain(x - 2 * h) || !prm.in_domain(x + 2 * h))
    throw DomainViolation("x = " + format_double(x) + " is too close to the edge of the coordinate range");
  const double psi0 = ml_wavefunction(prm, pair, x);
  detail::Derivatives d{};
  if (psi0 != 0.0) {
    auto ratio = [&](double offset) { return ml_wavefunction_ratio(prm, pair, x, offset); };
    d = detail::central_derivatives(ratio, 0.0, h);
  }
  const auto bp = ml_b_params(prm);
  const double l = prm.lambda;
  const double s = 1.0 + l * x * x;
  const double potential = l * pair.A - l * pair.A / s + l * (pair.B1 * s + bp.B2 * s * s + bp.B3 * s * s * s + bp.B4 * s * s * s * s);
  if (psi0 == 0.0) {
    // odd state at the origin: differentiate psi itself
    auto psi = [&](double t) { return ml_wavefunction(prm, pair, t); };
    const auto raw = detail::central_derivatives(psi, x, h);
    return -s * raw.d2 - l * x * raw.d1;
  }
  return psi0 * (-s * d.d2 - l * x * d.d1 + potential - pair.energy);
}

/// max |residual / psi| over `count` equally spaced points of [lo, hi].
inline double schrodinger_residual_scan(const MLParams& prm, const MLEigenpair& pair, double lo, double hi, int count) {
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    const double psi = ml_wavefunction(prm, pair, x);
    worst = std::max(worst, std::fabs(schrodinger_residual(prm, pair, x) / psi));
  }
  return worst;
}

/// Sign changes of psi over `samples` points spanning (-x_max, x_max), clipped to the coordinate range.
inline int ml_node_count(const MLParams& prm, const MLEigenpair& pair, double x_max, int samples = 4001) {
  const double limit = std::min(x_max, 0.999 * prm.x_limit());
  int nodes = 0;
  double previous = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = -limit + 2 * limit * i / (samples - 1);
    const double v = ml_wavefunction(prm, pair, x);
    if (v == 0.0) continue;
    if (previous != 0.0 && (v > 0) != (previous > 0)) ++nodes;
    previous = v;
  }
  return nodes;
}

/// Integral of psi^2 against d mu = (1 + l x^2)^(-1/2) dx over the coordinate range.
///
/// lambda > 0: x = tan(theta) / sqrt(lambda) and adaptive Gauss-Kronrod on (-pi/2, pi/2),
/// with 15, 31 or 61 points per panel for refinement 0, 1, 2.
/// lambda < 0: x = sin(theta) / sqrt(|lambda|) and tanh-sinh, which tolerates the
/// integrable endpoint singularities; refinement tightens the tolerance.
inline double normalizability_norm(const MLParams& prm, const MLEigenpair& pair, int refinement = 0) {
  prm.validate();
  if (!pair.normalizable) throw NotNormalizable("normalizability condition fails: " + pair.normalizability_condition);
  const double root_l = std::sqrt(std::fabs(prm.lambda));
  const double half_pi = std::numbers::pi / 2;
  if (prm.lambda > 0) {
    auto integrand = [&](double theta) {
      const double x = std::tan(theta) / root_l;
      const double psi = ml_wavefunction(prm, pair, x);
      if (psi == 0.0) return 0.0;
      const double sec = 1.0 / std::cos(theta);
      return psi * psi / std::sqrt(1.0 + prm.lambda * x * x) * sec * sec / root_l;
    };
    using namespace boost::math::quadrature;
    switch (refinement) {
      case 0: return gauss_kronrod<double, 15>::integrate(integrand, -half_pi, half_pi, 15, 1e-12);
      case 1: return gauss_kronrod<double, 31>::integrate(integrand, -half_pi, half_pi, 15, 1e-12);
      default: return gauss_kronrod<double, 61>::integrate(integrand, -half_pi, half_pi, 15, 1e-12);
    }
  }
  auto integrand = [&](double theta) {
    const double c = std::cos(theta);
    if (c <= 0.0) return 0.0;
    const double x = std::sin(theta) / root_l;
    if (!prm.in_domain(x)) return 0.0;
    const double psi = ml_wavefunction(prm, pair, x);
    // dx = cos(theta) / sqrt|l| d theta and (1 + l x^2)^(-1/2) = 1 / cos(theta)
    return psi * psi / root_l;
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double tol = refinement == 0 ? 1e-10 : 1e-13;
  return integrator.integrate(integrand, -half_pi, half_pi, tol);
}

}  // namespace heun

#endif  // HEUN_MLOSC_HPP
