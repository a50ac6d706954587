#ifndef SELFSIM_SHOOTING_HPP
#define SELFSIM_SHOOTING_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "selfsim/integrator.hpp"
#include "selfsim/params.hpp"
#include "selfsim/trajectory.hpp"

namespace selfsim {

enum class OrbitFate { EscapedPlus, EscapedMinus, Trapped };

struct OrbitClass {
    OrbitFate fate = OrbitFate::Trapped;
    int zero_count = 0;                 // sign changes of h on (0, escape or x_max)
    std::optional<double> escape_x;
};

// A converged excited profile f_n.
struct ConnectingOrbit {
    EquationParams params;
    int n = 0;            // crossings of f with pi/2 on [0,1)
    double beta_x = 0.0;  // signed lightcone coefficient, h ~ beta x^{m-1} (after reflection)
    double a = 0.0;       // origin slope, f ~ a rho^l, normalized a > 0
    double b_rho = 0.0;   // lightcone slope in the reporting convention (see ode.hpp)
    Trajectory profile;   // rho coordinates, increasing, [eps, 1-eps]
    double energy = 0.0;  // filled by observables (m = 3 only)
    double newton_residual = 0.0;
};

struct ShooterConfig {
    int n_max = 4;
    double beta_scan_min = 1e-6;
    double bracket_growth = 1.3;
    double bisect_tol = 1e-12;  // relative bracket width target
    double newton_tol = 1e-10;  // matching-residual target
    int newton_max_iter = 40;
    double fit_point = 0.5;     // rho_mid
    IntegratorConfig integ;
};

struct BracketNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NewtonDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ClassificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Launch the b-orbit h ~ beta x^{m-1}, integrate with event detection,
// classify by fate and zero count (Trapped iff x_max reached with |h| < pi/2).
OrbitClass classify_orbit(const EquationParams& p, double beta, const ShooterConfig& cfg);

// Full classification run, returning the trajectory as well (used for
// initial-guess extraction).
OrbitClass classify_orbit(const EquationParams& p, double beta, const ShooterConfig& cfg,
                          Trajectory& traj_out);

struct BetaBracket {
    double beta_lo = 0.0; // zero_count >= n+1 side
    double beta_hi = 0.0; // zero_count <= n side
    double beta_n = 0.0;  // midpoint after bisection
};

// Locate the n-th transition of the zero count and bisect it down to
// relative width cfg.bisect_tol.
BetaBracket find_beta_n(const EquationParams& p, int n, const ShooterConfig& cfg);

// Coordinate conversion of the raw shooting coefficient: with
// rho = sech x, 1 - rho = x^2/2 + O(x^4), the sigma-series coefficient is
// b_sigma = beta 2^{(m-1)/2}; the reported b_rho flips sign for m = 3
// ((rho-1) convention).
double convert_parameters(const EquationParams& p, double beta_x);

// Two-sided shooting-to-a-fitting-point refinement: Newton on (a, b)
// matching (f, f') at rho_mid, launched from the bisection result.
// Applies the h -> -h reflection so that a > 0 and f(0) = 0.
ConnectingOrbit refine_two_sided(const EquationParams& p, const BetaBracket& bracket, int n,
                                 const ShooterConfig& cfg);

// Convenience driver: brackets and refines orbits n = 0..n_max.
std::vector<ConnectingOrbit> solve_family(const EquationParams& p, const ShooterConfig& cfg);

} // namespace selfsim

#endif
