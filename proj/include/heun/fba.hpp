#ifndef HEUN_FBA_HPP
#define HEUN_FBA_HPP

// Functional Bethe ansatz: Z from the roots via the sums S_m, T_m (or their
// monomial expansions), the Bethe ansatz equations, and a multistart Newton
// solver for them.

#include "heun/errors.hpp"
#include "heun/ode.hpp"
#include "heun/poly.hpp"
#include "heun/roots.hpp"
#include "heun/scalar.hpp"
#include "heun/symfunc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace heun {

namespace detail {

template <Scalar S>
void check_root_count(int n, const RootSet<S>& rs) {
  if (n < 0 || rs.size() != static_cast<std::size_t>(n))
    throw ShapeError("root set has " + std::to_string(rs.size()) + " roots, expected n = " + std::to_string(n));
}

}  // namespace detail

/// c_l = -2 sum_{m=1}^{k-1-l} a_{l+m+1} S_m - sum_{m=0}^{k-2-l} b_{l+m+1} T_m, l = 0 .. k-2,
/// with S_m taken as the literal double sum.
template <Scalar S>
Poly<S> fba_coefficients_sums(const OdeSystem<S>& sys, int n, const RootSet<S>& rs) {
  detail::check_root_count(n, rs);
  const int k = sys.k();
  std::vector<S> s_m(static_cast<std::size_t>(k), S{0});
  std::vector<S> t_m(static_cast<std::size_t>(k), S{0});
  for (int m = 1; m <= k - 1; ++m) s_m[m] = s_direct(rs, m);
  t_m[0] = S(static_cast<long long>(rs.size()));
  for (int m = 1; m <= k - 2; ++m) t_m[m] = power_sum(rs, m);

  std::vector<S> c(static_cast<std::size_t>(k - 1), S{0});
  for (int l = 0; l <= k - 2; ++l) {
    S acc{0};
    for (int m = 1; m <= k - 1 - l; ++m) acc -= S{2} * sys.a(l + m + 1) * s_m[m];
    for (int m = 0; m <= k - 2 - l; ++m) acc -= sys.b(l + m + 1) * t_m[m];
    c[l] = acc;
  }
  return Poly<S>(std::move(c));
}

/// The same coefficients written in monomial symmetric polynomials:
/// c_{k-2} = -n(n-1) a_k - n b_{k-1},
/// c_l = -n(n-1) a_{l+2} - n b_{l+1}
///       - 2 sum_{m=2}^{k-1-l} a_{l+m+1} [(n-1) m_(m-1) + sum_{p=1}^{[(m-1)/2]} m_(m-1-p,p)]
///       - sum_{m=1}^{k-2-l} b_{l+m+1} m_(m).
template <Scalar S>
Poly<S> fba_coefficients_monomial(const OdeSystem<S>& sys, int n, const RootSet<S>& rs) {
  detail::check_root_count(n, rs);
  const int k = sys.k();
  const S nn(static_cast<long long>(n));
  std::vector<S> c(static_cast<std::size_t>(k - 1), S{0});
  c[k - 2] = -nn * (nn - S{1}) * sys.a(k) - nn * sys.b(k - 1);
  for (int l = 0; l <= k - 3; ++l) {
    S acc = -nn * (nn - S{1}) * sys.a(l + 2) - nn * sys.b(l + 1);
    for (int m = 2; m <= k - 1 - l; ++m) {
      S bracket = (nn - S{1}) * monomial(rs, Partition{m - 1});
      for (int p = 1; p <= (m - 1) / 2; ++p) bracket += monomial(rs, Partition{m - 1 - p, p});
      acc -= S{2} * sys.a(l + m + 1) * bracket;
    }
    for (int m = 1; m <= k - 2 - l; ++m) acc -= sys.b(l + m + 1) * monomial(rs, Partition{m});
    c[l] = acc;
  }
  return Poly<S>(std::move(c));
}

/// Z induced by the roots. Both evaluations above are computed; they must agree
/// exactly in exact mode and to `float_tol` (relative) in float mode.
template <Scalar S>
Poly<S> fba_coefficients(const OdeSystem<S>& sys, int n, const RootSet<S>& rs, double float_tol = 1e-7) {
  Poly<S> by_monomials = fba_coefficients_monomial(sys, n, rs);
  Poly<S> by_sums = fba_coefficients_sums(sys, n, rs);
  if constexpr (is_exact_v<S>) {
    if (by_monomials != by_sums) throw InternalMismatch("S_m/T_m and monomial forms of Z disagree");
  } else {
    const double scale = std::max(1.0, by_monomials.max_abs_coeff());
    if ((by_monomials - by_sums).max_abs_coeff() > float_tol * scale)
      throw InternalMismatch("S_m/T_m and monomial forms of Z disagree beyond tolerance");
  }
  return by_monomials;
}

namespace detail {

template <Scalar S>
void check_poles(const OdeSystem<S>& sys, const RootSet<S>& rs, double pole_guard) {
  for (const auto& z : rs) {
    const S xz = eval(sys.X(), z);
    const bool on_pole = is_exact_v<S> ? xz == S{0} : std::fabs(to_double(xz)) < pole_guard;
    if (on_pole) throw PoleAtRoot("X vanishes at root " + format_scalar(z));
  }
}

}  // namespace detail

/// sum_{j != i} 2 / (z_i - z_j) + Y(z_i) / X(z_i), one entry per root.
template <Scalar S>
std::vector<S> bethe_residuals(const OdeSystem<S>& sys, const RootSet<S>& rs, double pole_guard = 1e-10) {
  detail::check_poles(sys, rs, pole_guard);
  std::vector<S> out;
  out.reserve(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    S acc = eval(sys.Y(), rs[i]) / eval(sys.X(), rs[i]);
    for (std::size_t j = 0; j < rs.size(); ++j) {
      if (j == i) continue;
      S gap = rs[i] - rs[j];
      if (gap == S{0}) throw DegenerateRoots("coincident roots");
      acc += S{2} / gap;
    }
    out.push_back(acc);
  }
  return out;
}

/// Residue of the meromorphic remainder at z_i: X(z_i) sum_{j != i} 2/(z_i - z_j) + Y(z_i).
/// `Z` only fixes the equation; it does not enter the residue. `i` is 0-based.
template <Scalar S>
S residue_at_root(const OdeSystem<S>& sys, const Poly<S>& Z, const RootSet<S>& rs, std::size_t i) {
  if (Z.degree() > sys.k() - 2) throw ShapeError("deg Z exceeds k - 2");
  if (i >= rs.size()) throw std::out_of_range("residue_at_root: root index out of range");
  S sum{0};
  for (std::size_t j = 0; j < rs.size(); ++j) {
    if (j == i) continue;
    S gap = rs[i] - rs[j];
    if (gap == S{0}) throw DegenerateRoots("coincident roots");
    sum += S{2} / gap;
  }
  return eval(sys.X(), rs[i]) * sum + eval(sys.Y(), rs[i]);
}

struct SolverConfig {
  int max_iterations = 200;
  double newton_tolerance = 1e-11;
  int multistart_count = 64;
  std::uint64_t seed = 1;
  double distinctness_tolerance = 1e-8;
  double pole_guard = 1e-10;
  double interval_lo = -1.0;
  double interval_hi = 1.0;
  /// A start is abandoned once any root leaves [-divergence_bound, divergence_bound].
  double divergence_bound = 1e6;

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
    if (!(newton_tolerance > 0) || !(distinctness_tolerance > 0) || !(pole_guard > 0))
      throw std::invalid_argument("solver tolerances must be positive");
    if (multistart_count < 1) throw std::invalid_argument("multistart_count must be at least 1");
    if (!(interval_lo < interval_hi)) throw std::invalid_argument("search interval must satisfy lo < hi");
    if (!(divergence_bound > 0)) throw std::invalid_argument("divergence_bound must be positive");
  }
};

struct BetheSolution {
  RootSet<double> roots;
  double residual_norm = 0.0;  ///< max |BAE residual|
  Poly<double> Z;
};

enum class StartOutcome { converged, singular_jacobian, stalled, max_iterations, diverged, rejected_degenerate, rejected_pole,
                          rejected_asymptotic };

inline const char* to_string(StartOutcome o) {
  switch (o) {
    case StartOutcome::converged: return "converged";
    case StartOutcome::singular_jacobian: return "singular_jacobian";
    case StartOutcome::stalled: return "stalled";
    case StartOutcome::max_iterations: return "max_iterations";
    case StartOutcome::diverged: return "diverged";
    case StartOutcome::rejected_degenerate: return "rejected_degenerate";
    case StartOutcome::rejected_pole: return "rejected_pole";
    case StartOutcome::rejected_asymptotic: return "rejected_asymptotic";
  }
  return "unknown";
}

struct BetheSearch {
  std::vector<BetheSolution> solutions;  ///< deduplicated, sorted lexicographically by roots
  std::vector<StartOutcome> starts;      ///< one entry per initial guess, in start order
};

namespace detail {

class BetheNewton {
 public:
  BetheNewton(const OdeSystem<double>& sys, const SolverConfig& cfg)
      : sys_(sys), cfg_(cfg), dx_(derivative(sys.X())), dy_(derivative(sys.Y())) {}

  /// NaN entries signal a pole or a collision.
  Eigen::VectorXd residual(const Eigen::VectorXd& z) const {
    const auto n = z.size();
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xz = eval(sys_.X(), z[i]);
      double acc = xz == 0.0 ? std::numeric_limits<double>::quiet_NaN() : eval(sys_.Y(), z[i]) / xz;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double gap = z[i] - z[j];
        acc += gap == 0.0 ? std::numeric_limits<double>::quiet_NaN() : 2.0 / gap;
      }
      f[i] = acc;
    }
    return f;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const {
    const auto n = z.size();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xz = eval(sys_.X(), z[i]);
      const double yz = eval(sys_.Y(), z[i]);
      // d/dz (Y/X) = (Y' X - Y X') / X^2
      double diag = (eval(dy_, z[i]) * xz - yz * eval(dx_, z[i])) / (xz * xz);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double inv = 1.0 / (z[i] - z[j]);
        const double d = 2.0 * inv * inv;
        diag -= d;
        jac(i, j) = d;
      }
      jac(i, i) = diag;
    }
    return jac;
  }

  /// Largest |X(z_i) sum_j 2/(z_i - z_j) + Y(z_i)| relative to the size of its terms.
  /// Y/X decays at infinity, so Newton can meet the tolerance on roots running off to
  /// large |z| where the polynomial form does not vanish at all.
  double relative_residue(const Eigen::VectorXd& z) const {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double xz = eval(sys_.X(), z[i]);
      const double yz = eval(sys_.Y(), z[i]);
      double sum = 0.0, mag = 0.0;
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        if (j == i) continue;
        sum += 2.0 / (z[i] - z[j]);
        mag += std::fabs(2.0 / (z[i] - z[j]));
      }
      const double scale = std::fabs(xz) * mag + std::fabs(yz);
      if (scale == 0.0) continue;
      worst = std::max(worst, std::fabs(xz * sum + yz) / scale);
    }
    return worst;
  }

  static double norm(const Eigen::VectorXd& f) {
    if (!f.allFinite()) return std::numeric_limits<double>::infinity();
    return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
  }

  StartOutcome run(Eigen::VectorXd& z) const {
    Eigen::VectorXd f = residual(z);
    double fnorm = norm(f);
    for (int iter = 0; iter < cfg_.max_iterations; ++iter) {
      if (fnorm < cfg_.newton_tolerance) {
        polish(z, f, fnorm);
        return StartOutcome::converged;
      }
      Eigen::VectorXd step;
      if (!newton_step(z, f, step)) return StartOutcome::singular_jacobian;
      // halve the step until the residual norm decreases
      bool accepted = false;
      double t = 1.0;
      for (int halving = 0; halving <= 30; ++halving, t *= 0.5) {
        Eigen::VectorXd trial = z + t * step;
        Eigen::VectorXd ft = residual(trial);
        const double tn = norm(ft);
        if (tn < fnorm) {
          z = std::move(trial);
          f = std::move(ft);
          fnorm = tn;
          accepted = true;
          break;
        }
      }
      if (!accepted) return StartOutcome::stalled;
      if (z.cwiseAbs().maxCoeff() > cfg_.divergence_bound) return StartOutcome::diverged;
    }
    return fnorm < cfg_.newton_tolerance ? StartOutcome::converged : StartOutcome::max_iterations;
  }

 private:
  bool newton_step(const Eigen::VectorXd& z, const Eigen::VectorXd& f, Eigen::VectorXd& step) const {
    Eigen::MatrixXd jac = jacobian(z);
    if (!jac.allFinite()) return false;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) return false;
    step = lu.solve(-f);
    return step.allFinite();
  }

  // A few undamped steps past the tolerance, kept only while they help.
  void polish(Eigen::VectorXd& z, Eigen::VectorXd& f, double& fnorm) const {
    for (int i = 0; i < 3 && fnorm > 0.0; ++i) {
      Eigen::VectorXd step;
      if (!newton_step(z, f, step)) return;
      Eigen::VectorXd trial = z + step;
      Eigen::VectorXd ft = residual(trial);
      const double tn = norm(ft);
      if (!(tn < fnorm)) return;
      z = std::move(trial);
      f = std::move(ft);
      fnorm = tn;
    }
  }

  const OdeSystem<double>& sys_;
  const SolverConfig& cfg_;
  Poly<double> dx_;
  Poly<double> dy_;
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline Eigen::VectorXd initial_guess(int n, int start, const SolverConfig& cfg, std::mt19937_64& rng) {
  const double mid = 0.5 * (cfg.interval_lo + cfg.interval_hi);
  const double half = 0.5 * (cfg.interval_hi - cfg.interval_lo);
  Eigen::VectorXd z(n);
  if (start % 2 == 0) {
    // Chebyshev nodes, jittered on every start but the first
    const double jitter = start == 0 ? 0.0 : half / n;
    for (int j = 0; j < n; ++j) {
      double node = mid + half * std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * n));
      if (start != 0) node += (unit_uniform(rng) - 0.5) * jitter;
      z[j] = node;
    }
  } else {
    for (int j = 0; j < n; ++j) z[j] = cfg.interval_lo + (cfg.interval_hi - cfg.interval_lo) * unit_uniform(rng);
  }
  std::sort(z.data(), z.data() + n);
  return z;
}

}  // namespace detail

/// Multistart damped Newton on the n Bethe ansatz equations.
///
/// Starts are run in order from a single seeded generator, so the result is a
/// function of (sys, n, cfg) alone. Converged candidates must have distinct
/// roots and stay clear of zeros of X; candidates matching within
/// distinctness_tolerance are merged.
inline BetheSearch solve_bethe(const OdeSystem<double>& sys, int n, const SolverConfig& cfg) {
  cfg.validate();
  if (n < 1) throw std::invalid_argument("solve_bethe requires n >= 1");
  detail::BetheNewton newton(sys, cfg);
  std::mt19937_64 rng(cfg.seed);
  BetheSearch search;
  std::vector<std::vector<double>> candidates;

  for (int start = 0; start < cfg.multistart_count; ++start) {
    Eigen::VectorXd z = detail::initial_guess(n, start, cfg, rng);
    StartOutcome outcome = newton.run(z);
    if (outcome == StartOutcome::converged) {
      std::vector<double> roots(z.data(), z.data() + n);
      std::sort(roots.begin(), roots.end());
      bool distinct = true;
      for (int i = 1; i < n; ++i) distinct = distinct && roots[i] - roots[i - 1] > cfg.distinctness_tolerance;
      bool clear = true;
      for (double r : roots) clear = clear && std::fabs(eval(sys.X(), r)) >= cfg.pole_guard;
      if (!distinct) {
        outcome = StartOutcome::rejected_degenerate;
      } else if (!clear) {
        outcome = StartOutcome::rejected_pole;
      } else if (newton.relative_residue(z) > std::sqrt(cfg.newton_tolerance)) {
        outcome = StartOutcome::rejected_asymptotic;
      } else {
        candidates.push_back(std::move(roots));
      }
    }
    search.starts.push_back(outcome);
  }

  std::sort(candidates.begin(), candidates.end());
  std::vector<std::vector<double>> unique;
  for (auto& c : candidates) {
    bool duplicate = false;
    for (const auto& u : unique) {
      double diff = 0.0;
      for (int i = 0; i < n; ++i) diff = std::max(diff, std::fabs(c[i] - u[i]));
      if (diff < cfg.distinctness_tolerance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) unique.push_back(std::move(c));
  }

  for (auto& roots : unique) {
    RootSet<double> rs(roots);
    auto res = bethe_residuals(sys, rs, cfg.pole_guard);
    double rn = 0.0;
    for (double v : res) rn = std::max(rn, std::fabs(v));
    Poly<double> zpoly = fba_coefficients(sys, n, rs);
    search.solutions.push_back(BetheSolution{std::move(rs), rn, std::move(zpoly)});
  }
  return search;
}

}  // namespace heun

#endif  // HEUN_FBA_HPP
