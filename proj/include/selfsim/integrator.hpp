#ifndef SELFSIM_INTEGRATOR_HPP
#define SELFSIM_INTEGRATOR_HPP

#include <functional>
#include <optional>

#include "selfsim/params.hpp"
#include "selfsim/trajectory.hpp"

namespace selfsim {

struct IntegratorConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    double h_init = 1e-4;
    double h_min = 1e-14;
    double h_max = 0.5;
    double x_max = 40.0;      // truncation abscissa for X-coordinate runs
    double launch_eps_x = 1e-4;   // series launch offset in x
    double launch_eps_rho = 1e-6; // series launch offset from rho = 0 and rho = 1
    double w_escape_factor = 1.01; // escape threshold = factor * k (saddle level)
};

// Event tracking switches for one integration run.
struct EventSpec {
    bool track_crossings = false;  // sign changes of u (h through 0 / f through level)
    double crossing_level = 0.0;
    bool track_extrema = false;    // sign changes of u'
    // Escape detection: terminate once W > w_escape and |h| > pi/2.
    std::optional<double> w_escape;       // threshold on W (X-coordinate runs only)
    std::optional<EquationParams> params; // needed to evaluate W
};

using RhsFn = std::function<PhaseState(double, const PhaseState&)>;

// Adaptive Dormand-Prince 5(4) with PI step-size control, cubic Hermite
// dense output, and event localization by bisection on the interpolant.
// Integrates from t0 to t_end (either direction).  Terminates early on
// escape detection or step underflow (Termination::StepFailure).
Trajectory integrate(const RhsFn& rhs, double t0, const PhaseState& s0, double t_end,
                     const IntegratorConfig& cfg, Coordinate coord, const EventSpec& events = {});

// Single-state result of a renormalized linear run (see below).
struct LinearEndpoint {
    double t = 0.0;
    PhaseState s;       // state rescaled to unit norm at the last renormalization
    double log_scale = 0.0; // accumulated log of the factors divided out
    bool ok = false;
};

// Integrate a *linear* system from t0 to t_end without storing the path,
// dividing the state by its norm whenever it leaves [1e-100, 1e100].
// Ratios such as u'/u and Wronskians are unaffected by the rescaling.
LinearEndpoint integrate_linear_renormalized(const RhsFn& rhs, double t0, const PhaseState& s0,
                                             double t_end, double rel_tol, double h_min = 1e-14);

} // namespace selfsim

#endif
