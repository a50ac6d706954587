#include "selfsim/ode.hpp"

#include <cmath>
#include <stdexcept>

namespace selfsim {

PhaseState rhs_x(const EquationParams& p, double x, const PhaseState& s) {
    if (!(x > 0.0))
        throw std::domain_error("rhs_x: x must be positive (coth singular at 0)");
    const double cothx = 1.0 / std::tanh(x);
    return {s.du, (p.m - 2) * cothx * s.du - p.k * std::sin(2.0 * s.u)};
}

PhaseState rhs_rho(const EquationParams& p, double rho, const PhaseState& s) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("rhs_rho: rho must lie in (0,1)");
    const double om = 1.0 - rho * rho;
    const double drift = (p.m - 1) / rho + (p.m - 3) * rho / om;
    return {s.du, -drift * s.du + p.k * std::sin(2.0 * s.u) / (rho * rho * om)};
}

double origin_c1(const EquationParams& p, double a) {
    // Matching f = a rho^l (1 + c1 rho^2) in the rho-equation at order rho^l:
    //   c1 * 2(m + 2l) = 2k - (m-3) l - [l==1] (4/3) k a^2
    double num = 2.0 * p.k - (p.m - 3) * p.l;
    if (p.l == 1)
        num -= (4.0 / 3.0) * p.k * a * a;
    return num / (2.0 * (p.m + 2.0 * p.l));
}

PhaseState series_origin(const EquationParams& p, double a, double rho) {
    const double c1 = origin_c1(p, a);
    const double rl = std::pow(rho, p.l);
    const double f = a * rl * (1.0 + c1 * rho * rho);
    const double df = a * rl / rho * (p.l + (p.l + 2) * c1 * rho * rho);
    return {f, df};
}

double lightcone_d1(const EquationParams& p) {
    // h = beta x^{m-1} (1 + d1 x^2): order matching in the x-equation gives
    //   d1 = ((m-2)(m-1)/3 - 2k) / (2(m+1)).
    return ((p.m - 2) * (p.m - 1) / 3.0 - 2.0 * p.k) / (2.0 * (p.m + 1));
}

PhaseState series_lightcone(const EquationParams& p, double beta, double x) {
    const double d1 = lightcone_d1(p);
    const int pw = p.m - 1;
    const double xp = std::pow(x, pw);
    const double h = beta * xp * (1.0 + d1 * x * x);
    const double dh = beta * xp / x * (pw + (pw + 2) * d1 * x * x);
    return {h, dh};
}

double lightcone_rho_e1(const EquationParams& p) {
    // f = pi/2 + b sigma^q (1 + e1 sigma), sigma = 1-rho, q = (m-1)/2:
    //   e1 (q+1) = q (3m-1)/4 - k.
    const double q = 0.5 * (p.m - 1);
    return (q * (3.0 * p.m - 1.0) / 4.0 - p.k) / (q + 1.0);
}

PhaseState series_lightcone_rho(const EquationParams& p, double b_sigma, double rho) {
    const double q = 0.5 * (p.m - 1);
    const double e1 = lightcone_rho_e1(p);
    const double sig = 1.0 - rho;
    const double sq = std::pow(sig, q);
    const double f = 0.5 * M_PI + b_sigma * sq * (1.0 + e1 * sig);
    // d/drho = -d/dsigma
    const double df = -b_sigma * sq / sig * (q + (q + 1.0) * e1 * sig);
    return {f, df};
}

double w_value(const EquationParams& p, const PhaseState& s) {
    const double sh = std::sin(s.u);
    return 0.5 * s.du * s.du + p.k * sh * sh;
}

} // namespace selfsim
