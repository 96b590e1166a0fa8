// Heun equation (k = 3) with a cubic solution picked by hand: fix the roots,
// read off Z from both routes and check the residual vanishes.
#include "heun/constants.hpp"
#include "heun/fba.hpp"

#include <iostream>

int main() {
  using heun::Rational;
  using P = heun::Poly<Rational>;
  // X = z (z - 1) (z - 2), Y = 3z^2 - 5z + 1
  heun::OdeSystem<Rational> sys(3, P{0, 2, -3, 1}, P{1, -5, 3});
  heun::RootSet<Rational> roots({Rational(-1, 2), Rational(1, 3), Rational(5, 2)});
  const int n = 3;

  const auto closed = heun::constants_closed_form(sys, n, roots);
  const auto solved = heun::solve_constants_system(sys, n, roots);
  const auto z = heun::coefficient_relations(sys, n, closed);
  const auto z_fba = heun::fba_coefficients(sys, n, roots);

  std::cout << "C_1 (closed form)  = " << heun::format_scalar(closed.C(1)) << "\n"
            << "C_1 (linear solve) = " << heun::format_scalar(solved.C(1)) << "\n"
            << "Z                  = " << heun::to_string(z) << "\n"
            << "Z (Bethe route)    = " << heun::to_string(z_fba) << "\n";
  // These roots are arbitrary, so the residual is only reduced to degree n - 1, not zero.
  const auto residual = heun::ode_residual(sys, z, heun::poly_from_roots(roots));
  std::cout << "residual           = " << heun::to_string(residual) << "\n";
  return closed == solved && z == z_fba && residual.degree() < n ? 0 : 1;
}
