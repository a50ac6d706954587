#ifndef SELFSIM_OBSERVABLES_HPP
#define SELFSIM_OBSERVABLES_HPP

#include <vector>

#include "selfsim/params.hpp"
#include "selfsim/shooting.hpp"

namespace selfsim {

struct EnergyReport {
    int n = 0;
    double E = 0.0;
    double quadrature_error_estimate = 0.0;
    bool converged = true;
};

struct ConditionReport {
    int m = 0;
    int l = 0;
    double threshold = 0.0;     // (sqrt(2)-1)/2 * (m-2)
    bool admissible = false;    // l > threshold
    bool oscillation_check = false; // zeros of H keep accumulating on [0, 60]
};

// Energy of a converged m = 3 profile,
//     E[f] = 1/2 int_0^1 (rho^2 f'^2 - 2 cos^2(f)/(1-rho^2)) drho,
// computed by re-integrating the profile ODE augmented with the energy
// density from both singular ends, plus analytic endpoint tails.
// Throws std::invalid_argument for m != 3 (the functional is specific to m = 3).
EnergyReport energy(const ConnectingOrbit& orbit, const IntegratorConfig& cfg = {});

// Consecutive ratios E_n / E_{n+1}.
std::vector<double> energy_ratios(const std::vector<EnergyReport>& reports);

// Large-n limit of the energy ratio at (m=3, l=1): e^{2 pi / sqrt(7)}.
double energy_ratio_limit_m3();

// Admissibility of (m, l): analytic test l > (sqrt(2)-1)(m-2)/2 plus a
// numerical oscillation check of the limiting linear equation
//     H'' - (m-2) coth(x) H' + 2k H = 0,  H ~ x^{m-1}.
// Throws std::invalid_argument for even m.
ConditionReport check_condition(int m, int l);

struct LimitingH {
    std::vector<double> xs;
    std::vector<double> values;     // H rescaled by the running amplitude
    std::vector<double> log_scales; // log of the factor divided out at each sample
    std::vector<double> zeros;      // zero abscissae, increasing
};

// Integrate the limiting equation with envelope renormalization and locate
// its zeros on (0, x_end].
LimitingH limiting_H(const EquationParams& p, double x_end = 60.0, int samples_per_unit = 8);

} // namespace selfsim

#endif
