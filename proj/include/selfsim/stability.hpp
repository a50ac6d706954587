#ifndef SELFSIM_STABILITY_HPP
#define SELFSIM_STABILITY_HPP

#include <stdexcept>
#include <vector>

#include "selfsim/shooting.hpp"

namespace selfsim {

// Linear stability of f_n, m = 3, l = 1 only: eigenvalue problem
//     A v = (1 - lambda^2) v,
//     A = -(1-rho^2)^2/rho^2 d/drho(rho^2 d/drho) + 2(1-rho^2) cos(2 f_n)/rho^2,
// as the second-order equation
//     v'' + (2/rho) v' + [(1-lambda^2)/(1-rho^2)^2 - 2 cos(2 f_n)/(rho^2(1-rho^2))] v = 0
// with v ~ rho at 0 and v ~ (1-rho)^{(1+|lambda|)/2} at 1.

struct EigenShotConfig {
    double lambda2_min = 1e-3;
    double lambda2_max = 1e5;      // initial ceiling; extended decade-by-decade up to the cap
    double lambda2_hard_cap = 1e10;
    int points_per_decade = 16;
    double match_point = 0.5;
    double secant_tol = 1e-9;      // relative, on lambda^2
    double rel_tol = 1e-9;         // integrator tolerance for mismatch runs
    double endpoint_offset = 1e-6; // launch offsets (shrunk adaptively for large lambda)
    int threads = 1;               // worker cap for the scan fan-out
};

struct SpectrumResult {
    int n = 0;
    std::vector<double> eigenvalues; // lambda^2_k, increasing
    double gauge_residual = 0.0;     // max relative residual of the lambda=0 gauge solution
    int gauge_zero_count = 0;
};

struct CountMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// RHS of the linearized equation at fixed lambda^2, using the interpolated profile.
PhaseState eigen_rhs(const ConnectingOrbit& profile, double lambda2, double rho, const PhaseState& s);

struct MismatchResult {
    double value = 0.0;      // normalized Wronskian v_L' v_R - v_L v_R' at the match point
    bool node_collision = false; // |v| at the match point tiny relative to scale
    bool ok = true;
};

// Shoot from both ends to the match point; eigenvalues are the zeros of value.
MismatchResult eigen_mismatch(const ConnectingOrbit& profile, double lambda2,
                              const EigenShotConfig& cfg);

// Scan, bracket, and polish the point spectrum; verifies count == n.
SpectrumResult find_spectrum(const ConnectingOrbit& profile, const EigenShotConfig& cfg = {});

struct GaugeMode {
    std::vector<double> rho;
    std::vector<double> v;        // rho sqrt(1-rho^2) f_n'(rho)
    int zero_count = 0;
    double max_rel_residual = 0.0; // Eq. residual at lambda = 0 over rho in [0.01, 0.99]
};

// The lambda = 0 gauge solution generated by shifting the blow-up time.
// Not square-integrable at rho = 1; used as an analytic cross-check.
GaugeMode gauge_mode(const ConnectingOrbit& profile, int grid_points = 99);

// Second variation of the m = 3 energy at the profile,
//     delta^2 E = 1/2 int_0^1 (rho^2 v'^2 + 2 cos(2 f_n) v^2/(1-rho^2)) drho,
// for a sampled perturbation v with v(0) = v(1) = 0 (linear interpolation
// between samples; v' by finite differences of the samples).
double hessian_form(const ConnectingOrbit& profile, const std::vector<double>& rho,
                    const std::vector<double>& v);

// Assemble the eigenfunction for a converged eigenvalue on a uniform grid
// (normalized to max |v| = 1).  Used by tests and hessian_form checks.
struct EigenFunction {
    double lambda2 = 0.0;
    std::vector<double> rho;
    std::vector<double> v;
};
EigenFunction eigenfunction(const ConnectingOrbit& profile, double lambda2,
                            const EigenShotConfig& cfg, int grid_points = 400);

} // namespace selfsim

#endif
