#pragma once

#include <cmath>
#include <complex>

namespace saw {

using Complex = std::complex<double>;

namespace constants {

// Vacuum permittivity, F/m.
inline constexpr double eps0 = 8.8541878128e-12;

// Planck constant, J·s.
inline constexpr double h_planck = 6.62607015e-34;

// Elementary charge, C.
inline constexpr double elementary_charge = 1.602176634e-19;

}  // namespace constants

namespace scaling {

// Internal nondimensionalization for the Stroh eigenproblem. Stiffness is
// measured in units of c_star, permittivity in units of eps0, and the piezo
// tensor in units of sqrt(c_star * eps0); with these choices all blocks of
// the assembled boundary matrix share a common magnitude scale.
inline constexpr double c_star = 1.0e11;
inline const double e_star = std::sqrt(c_star * constants::eps0);  // C/m^2

}  // namespace scaling

}  // namespace saw
