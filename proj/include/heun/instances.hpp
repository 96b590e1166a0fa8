#ifndef HEUN_INSTANCES_HPP
#define HEUN_INSTANCES_HPP

#include "heun/ode.hpp"
#include "heun/poly.hpp"
#include "heun/roots.hpp"
#include "heun/scalar.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace heun {

struct ExactInstance {
  OdeSystem<Rational> sys;
  int n;
  RootSet<Rational> roots;
};

/// Seeded source of random exact problem instances.
///
/// Rationals have numerator in [-bound, bound] and denominator in [1, bound].
/// Only raw 64-bit draws are used, so a seed yields the same stream everywhere.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed, int bound = 9) : rng_(seed), bound_(bound) {}

  long uniform_int(long lo, long hi) { return lo + static_cast<long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  Rational rational() { return Rational(uniform_int(-bound_, bound_), uniform_int(1, bound_)); }

  Rational nonzero_rational() {
    for (;;) {
      Rational r = rational();
      if (r != 0) return r;
    }
  }

  std::vector<Rational> distinct_rationals(int count) {
    std::vector<Rational> out;
    while (static_cast<int>(out.size()) < count) {
      Rational r = rational();
      bool fresh = true;
      for (const auto& v : out) fresh = fresh && v != r;
      if (fresh) out.push_back(r);
    }
    return out;
  }

  RootSet<Rational> roots(int n) { return RootSet<Rational>(distinct_rationals(n)); }

  /// Random X of degree exactly k and Y of degree <= k - 1.
  OdeSystem<Rational> system(int k) {
    std::vector<Rational> x, y;
    for (int l = 0; l < k; ++l) x.push_back(rational());
    x.push_back(nonzero_rational());
    for (int l = 0; l < k; ++l) y.push_back(rational());
    return OdeSystem<Rational>(k, Poly<Rational>(std::move(x)), Poly<Rational>(std::move(y)));
  }

  ExactInstance instance(int k_min, int k_max, int n_min, int n_max) {
    const int k = static_cast<int>(uniform_int(k_min, k_max));
    const int n = static_cast<int>(uniform_int(n_min, n_max));
    auto sys = system(k);
    auto rs = roots(n);
    return ExactInstance{std::move(sys), n, std::move(rs)};
  }

 private:
  std::mt19937_64 rng_;
  int bound_;
};

}  // namespace heun

#endif  // HEUN_INSTANCES_HPP
