#ifndef SELFSIM_ODE_HPP
#define SELFSIM_ODE_HPP

#include "selfsim/params.hpp"

namespace selfsim {

// Profile equation in the compactified coordinate x = arcsech(rho),
// h = f - pi/2:
//
//     h'' - (m-2) coth(x) h' + k sin(2h) = 0,   x in (0, inf).
//
// Returns the first-order system derivative (h', h'').
PhaseState rhs_x(const EquationParams& p, double x, const PhaseState& s);

// Profile equation in the self-similar coordinate rho in (0,1):
//
//     f'' + ((m-1)/rho + (m-3) rho/(1-rho^2)) f' - k sin(2f)/(rho^2 (1-rho^2)) = 0.
PhaseState rhs_rho(const EquationParams& p, double rho, const PhaseState& s);

// Frobenius launch data near the regular singular point rho = 0:
//     f = a rho^l (1 + c1 rho^2 + O(rho^4)).
// The coefficient c1 follows from order matching; for l = 1 the cubic of
// sin(2f) contributes, so c1 depends on a.
double origin_c1(const EquationParams& p, double a);
PhaseState series_origin(const EquationParams& p, double a, double rho);

// Frobenius launch data near the past light cone, x = 0:
//     h = beta x^{m-1} (1 + d1 x^2 + O(x^4)).
double lightcone_d1(const EquationParams& p);
PhaseState series_lightcone(const EquationParams& p, double beta, double x);

// Frobenius launch data near rho = 1 in rho coordinates, written with
// sigma = 1 - rho:
//     f = pi/2 + b sigma^{(m-1)/2} (1 + e1 sigma + O(sigma^2)).
// Note: b here is the sigma-series coefficient; for m = 3 the reported
// b_rho uses the (rho-1) convention, i.e. b_rho = -b.
double lightcone_rho_e1(const EquationParams& p);
PhaseState series_lightcone_rho(const EquationParams& p, double b_sigma, double rho);

// Classification functional W = 1/2 h'^2 + k sin^2(h).  Along any
// nonconstant orbit of rhs_x, dW/dx = (m-2) coth(x) h'^2 >= 0; once
// W exceeds the saddle level k with |h| > pi/2 the orbit escapes.
double w_value(const EquationParams& p, const PhaseState& s);

} // namespace selfsim

#endif
