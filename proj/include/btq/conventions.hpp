#pragma once

// Single source of truth for every orientation and normalization choice.
// All modules derive their signs from the statements below; nothing else in
// the codebase is allowed to introduce a new convention.
//
//   symplectic form   omega = i dz dzbar / (1+|z|^2)^2, total area 2 pi.
//   measure           inner products integrate against omega/(2 pi), so Gram
//                     data is rational; see beta_integral.
//   hamiltonian field df = omega(X, .), giving X^{1,0} = -i (1+t)^2 df/dzbar.
//   poisson bracket   {f,g} = omega(X_f, X_g) = -X_f.g; {x1,x2} = 2 x3.
//   laplacian         G^{-1} d2/dz dzbar with G = (1+t)^{-2}.
//   canonical pairing s wedge conj(t) = C1 (s,t) omega with C1 = -i, which
//                     fixes |dz|^2 = (1+t)^2 on the canonical bundle and
//                     |(dz)^{1/2}|^2 = 1+t on its square root.
//   chart frame       orthonormal (1,0)-frame e = (1+t) d/dz, dual dz/(1+t);
//                     frame coefficients a_X = i dX^2/dz, b_X = -i dX^1/dzbar.
//   curvature report  the commutator defect of the corrected derivative is
//                     i R_op(X,Y) + B_j(X,Y)/2 with R_op = -(deg B) omega - d(gauge);
//                     reported curvature is R = -R_op, oriented so its class
//                     is the positive bundle degree. Operator-level formulas
//                     consume -R via BracketConstants::from_curvature, the one
//                     place where the two orientations meet.

namespace btq::conventions {

// Area of the sphere under the implemented symplectic form, in units of pi.
inline constexpr int total_area_in_pi = 2;

// {x1, x2} = poisson_orientation * x3 and cyclic.
inline constexpr int poisson_orientation = 2;

// Sign of the imaginary unit in the canonical pairing constant C1.
inline constexpr int canonical_pairing_sign = -1;

// Reported curvature class of the corrected quantizer at twist m is
// chern_orientation * (m + 1).
inline constexpr int chern_orientation = +1;

}  // namespace btq::conventions
