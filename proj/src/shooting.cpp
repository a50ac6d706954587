#include "selfsim/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selfsim/ode.hpp"

namespace selfsim {

namespace {

constexpr double half_pi = 1.5707963267948966;

IntegratorConfig classify_config(const ShooterConfig& cfg, double beta) {
    IntegratorConfig ic = cfg.integ;
    // Tie the absolute floor to the orbit amplitude so that small-beta
    // orbits (h ~ beta x^{m-1} << abs_tol) are still resolved relatively.
    ic.abs_tol = std::min(ic.abs_tol, std::max(std::abs(beta) * 1e-8, 1e-280));
    return ic;
}

} // namespace

OrbitClass classify_orbit(const EquationParams& p, double beta, const ShooterConfig& cfg,
                          Trajectory& traj_out) {
    if (!(beta != 0.0))
        throw std::invalid_argument("classify_orbit: beta must be nonzero");
    const IntegratorConfig ic = classify_config(cfg, beta);
    const double x0 = ic.launch_eps_x;
    const PhaseState s0 = series_lightcone(p, beta, x0);

    EventSpec ev;
    ev.track_crossings = true;
    ev.crossing_level = 0.0;
    ev.track_extrema = true;
    ev.w_escape = ic.w_escape_factor * p.k;
    ev.params = p;

    traj_out = integrate([&p](double x, const PhaseState& s) { return rhs_x(p, x, s); }, x0, s0,
                         ic.x_max, ic, Coordinate::X, ev);

    if (traj_out.termination == Termination::StepFailure)
        throw ClassificationFailure("classify_orbit: step underflow at x = " +
                                    std::to_string(traj_out.t_back()) +
                                    " (beta = " + std::to_string(beta) + ")");

    OrbitClass oc;
    oc.zero_count = static_cast<int>(traj_out.count_events(EventKind::Crossing));
    switch (traj_out.termination) {
    case Termination::EscapedPlus:
        oc.fate = OrbitFate::EscapedPlus;
        break;
    case Termination::EscapedMinus:
        oc.fate = OrbitFate::EscapedMinus;
        break;
    default:
        oc.fate = OrbitFate::Trapped;
        break;
    }
    if (oc.fate != OrbitFate::Trapped) {
        for (const auto& e : traj_out.events)
            if (e.kind == EventKind::EscapeThreshold) {
                oc.escape_x = e.abscissa;
                break;
            }
        if (!oc.escape_x)
            oc.escape_x = traj_out.t_back();
    }
    return oc;
}

OrbitClass classify_orbit(const EquationParams& p, double beta, const ShooterConfig& cfg) {
    Trajectory t;
    return classify_orbit(p, beta, cfg, t);
}

BetaBracket find_beta_n(const EquationParams& p, int n, const ShooterConfig& cfg) {
    if (n < 0)
        throw std::invalid_argument("find_beta_n: n must be >= 0");

    // Geometric scan upward; zero_count is a decreasing step function of
    // beta, dropping by one at each beta_n.
    const double beta_cap = 1e4;
    double beta_prev = cfg.beta_scan_min;
    int count_prev = classify_orbit(p, beta_prev, cfg).zero_count;
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (double beta = beta_prev * cfg.bracket_growth; beta <= beta_cap;
         beta *= cfg.bracket_growth) {
        const int count = classify_orbit(p, beta, cfg).zero_count;
        if (count_prev >= n + 1 && count <= n) {
            lo = beta_prev;
            hi = beta;
            found = true;
            break;
        }
        beta_prev = beta;
        count_prev = count;
    }
    if (!found)
        throw BracketNotFound("find_beta_n: no zero-count transition " + std::to_string(n + 1) +
                              " -> " + std::to_string(n) + " found in scan (m=" +
                              std::to_string(p.m) + ", l=" + std::to_string(p.l) + ")");

    while ((hi - lo) > cfg.bisect_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        const int count = classify_orbit(p, mid, cfg).zero_count;
        if (count <= n)
            hi = mid;
        else
            lo = mid;
    }
    return {lo, hi, 0.5 * (lo + hi)};
}

double convert_parameters(const EquationParams& p, double beta_x) {
    const double b_sigma = beta_x * std::pow(2.0, 0.5 * (p.m - 1));
    return (p.m == 3) ? -b_sigma : b_sigma;
}

namespace {

struct SideRuns {
    Trajectory left;  // rho0 -> rho_mid
    Trajectory right; // 1-eps -> rho_mid (decreasing)
    bool ok = false;
};

SideRuns run_both_sides(const EquationParams& p, double a, double b_sigma, const ShooterConfig& cfg,
                        double h_max, bool with_events) {
    SideRuns r;
    IntegratorConfig ic = cfg.integ;
    ic.h_max = h_max;
    const double rho0 = ic.launch_eps_rho;
    const double rho1 = 1.0 - ic.launch_eps_rho;
    EventSpec ev;
    if (with_events) {
        ev.track_crossings = true;
        ev.crossing_level = half_pi;
        ev.track_extrema = true;
    }
    auto rhs = [&p](double rho, const PhaseState& s) { return rhs_rho(p, rho, s); };
    r.left = integrate(rhs, rho0, series_origin(p, a, rho0), cfg.fit_point, ic, Coordinate::Rho, ev);
    r.right = integrate(rhs, rho1, series_lightcone_rho(p, b_sigma, rho1), cfg.fit_point, ic,
                        Coordinate::Rho, ev);
    r.ok = r.left.termination == Termination::ReachedEnd &&
           r.right.termination == Termination::ReachedEnd;
    return r;
}

// Matching mismatch (f_L - f_R, f_L' - f_R') at the fitting point.
bool mismatch(const EquationParams& p, double ln_a, double b_sigma, const ShooterConfig& cfg,
              double out[2]) {
    const SideRuns r = run_both_sides(p, std::exp(ln_a), b_sigma, cfg, 0.05, false);
    if (!r.ok)
        return false;
    const PhaseState sl = r.left.nodes.back().s;
    const PhaseState sr = r.right.nodes.back().s;
    out[0] = sl.u - sr.u;
    out[1] = sl.du - sr.du;
    return true;
}

// Estimate the origin slope coefficient from a near-connecting X-coordinate
// orbit: near the saddle, |h -+ pi/2| ~ C e^{-l x} and f ~ (C/2^l) rho^l.
double estimate_a(const EquationParams& p, const Trajectory& traj, int n) {
    const double h_inf = (n % 2 == 0) ? half_pi : -half_pi;
    double best_u = 1e300, best_x = 0.0;
    for (const auto& node : traj.nodes) {
        if (node.t < 1.0)
            continue;
        const double u = std::abs(node.s.u - h_inf);
        if (u < best_u) {
            best_u = u;
            best_x = node.t;
        }
    }
    // Prefer a fit point where the decaying tail still dominates the
    // bisection-residual regrowth: back off to |h -+ pi/2| ~ 1e-3.
    double fit_u = best_u, fit_x = best_x, fit_du = 0.0;
    double sign = 1.0;
    for (const auto& node : traj.nodes) {
        if (node.t < 1.0 || node.t > best_x)
            continue;
        const double dev = node.s.u - h_inf;
        const double u = std::abs(dev);
        if (u > 1e-4 && u < 1e-2 && u < fit_u + 1.0) {
            fit_u = u;
            fit_x = node.t;
            sign = (dev >= 0.0) ? 1.0 : -1.0;
            fit_du = sign * node.s.du;
        }
    }
    if (fit_u <= 0.0 || fit_u > 1e290)
        return 1.0;
    // Near the saddle the deviation is A e^{-l x} + B e^{mu x} with
    // mu = m - 2 + l; project out the growing mode with the derivative.
    const double mu = p.m - 2 + p.l;
    double C = (mu * fit_u - fit_du) * std::exp(p.l * fit_x) / (mu + p.l);
    if (!(C > 0.0) || !std::isfinite(C))
        C = fit_u * std::exp(p.l * fit_x);
    return C / std::pow(2.0, p.l);
}

} // namespace

ConnectingOrbit refine_two_sided(const EquationParams& p, const BetaBracket& bracket, int n,
                                 const ShooterConfig& cfg) {
    // Reflection: the raw positive-beta connecting orbit has h(inf) = +pi/2
    // for even n (f(0) = pi); reflect h -> -h so that f(0) = 0, a > 0.
    const double beta_eff = (n % 2 == 0) ? -bracket.beta_n : bracket.beta_n;
    const double b_sigma0 = beta_eff * std::pow(2.0, 0.5 * (p.m - 1));

    Trajectory class_traj;
    classify_orbit(p, bracket.beta_n, cfg, class_traj);
    double a0 = estimate_a(p, class_traj, n);
    if (!(a0 > 0.0) || !std::isfinite(a0))
        a0 = 1.0;

    auto norm = [](const double v[2]) { return std::max(std::abs(v[0]), std::abs(v[1])); };

    // The tail estimate of a can be off by a factor of a few; scan a coarse
    // geometric neighborhood and start Newton from the smallest mismatch.
    double ln_a = std::log(a0);
    double r[2];
    {
        double best_res = 1e300;
        bool any = false;
        for (int j = -6; j <= 6; ++j) {
            const double cand = std::log(a0) + 0.5 * j;
            double rc[2];
            if (!mismatch(p, cand, b_sigma0, cfg, rc))
                continue;
            any = true;
            if (norm(rc) < best_res) {
                best_res = norm(rc);
                ln_a = cand;
                r[0] = rc[0];
                r[1] = rc[1];
            }
        }
        if (!any)
            throw NewtonDivergence("refine_two_sided: initial side integration failed");
    }
    double b = b_sigma0;
    double res = norm(r);

    int it = 0;
    for (; it < cfg.newton_max_iter && res > cfg.newton_tol; ++it) {
        const double d1 = 1e-7;
        const double d2 = 1e-7 * std::max(std::abs(b), 1e-2);
        double rp1[2], rm1[2], rp2[2], rm2[2];
        if (!mismatch(p, ln_a + d1, b, cfg, rp1) || !mismatch(p, ln_a - d1, b, cfg, rm1) ||
            !mismatch(p, ln_a, b + d2, cfg, rp2) || !mismatch(p, ln_a, b - d2, cfg, rm2))
            throw NewtonDivergence("refine_two_sided: side integration failed in Jacobian");
        const double J11 = (rp1[0] - rm1[0]) / (2 * d1), J12 = (rp2[0] - rm2[0]) / (2 * d2);
        const double J21 = (rp1[1] - rm1[1]) / (2 * d1), J22 = (rp2[1] - rm2[1]) / (2 * d2);
        const double det = J11 * J22 - J12 * J21;
        if (det == 0.0 || !std::isfinite(det))
            throw NewtonDivergence("refine_two_sided: singular Jacobian");
        double step1 = (J22 * r[0] - J12 * r[1]) / det;
        double step2 = (J11 * r[1] - J21 * r[0]) / det;

        // Damped update: halve the step until the residual decreases.
        double lam = 1.0;
        bool accepted = false;
        for (int half = 0; half < 8; ++half, lam *= 0.5) {
            double rn[2];
            if (!mismatch(p, ln_a - lam * step1, b - lam * step2, cfg, rn))
                continue;
            if (norm(rn) < res || lam < 0.02) {
                ln_a -= lam * step1;
                b -= lam * step2;
                r[0] = rn[0];
                r[1] = rn[1];
                res = norm(r);
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw NewtonDivergence("refine_two_sided: line search failed, residual " +
                                   std::to_string(res));
    }
    if (res > cfg.newton_tol)
        throw NewtonDivergence("refine_two_sided: no convergence after " + std::to_string(it) +
                               " iterations, residual " + std::to_string(res));

    // The bisection already pins beta (hence b_sigma) to ~1e-12 relative;
    // a converged b far from that prediction means Newton left the basin
    // and landed on a different member of the family.
    if (std::abs(b - b_sigma0) > 0.1 * std::abs(b_sigma0))
        throw NewtonDivergence("refine_two_sided: converged to a foreign root (b = " +
                               std::to_string(b) + ", predicted " + std::to_string(b_sigma0) +
                               ")");

    // Final dense run with event tracking for the assembled profile.
    const double a = std::exp(ln_a);
    SideRuns runs = run_both_sides(p, a, b, cfg, 0.01, true);
    if (!runs.ok)
        throw NewtonDivergence("refine_two_sided: final assembly integration failed");

    ConnectingOrbit orbit;
    orbit.params = p;
    orbit.n = n;
    orbit.a = a;
    orbit.b_rho = (p.m == 3) ? -b : b;
    orbit.beta_x = b / std::pow(2.0, 0.5 * (p.m - 1));
    orbit.newton_residual = res;

    // Merge left (increasing) and reversed right into one increasing profile.
    orbit.profile.coordinate = Coordinate::Rho;
    orbit.profile.nodes = runs.left.nodes;
    std::vector<TrajectoryNode> right_nodes = runs.right.nodes;
    std::reverse(right_nodes.begin(), right_nodes.end());
    // Drop the duplicated fitting-point node from the right run.
    orbit.profile.nodes.insert(orbit.profile.nodes.end(), right_nodes.begin() + 1,
                               right_nodes.end());
    orbit.profile.events = runs.left.events;
    orbit.profile.events.insert(orbit.profile.events.end(), runs.right.events.begin(),
                                runs.right.events.end());
    std::sort(orbit.profile.events.begin(), orbit.profile.events.end(),
              [](const Event& x, const Event& y) { return x.abscissa < y.abscissa; });
    orbit.profile.termination = Termination::ReachedEnd;
    return orbit;
}

std::vector<ConnectingOrbit> solve_family(const EquationParams& p, const ShooterConfig& cfg) {
    std::vector<ConnectingOrbit> out;
    double beta_prev = 0.0;
    for (int n = 0; n <= cfg.n_max; ++n) {
        const BetaBracket br = find_beta_n(p, n, cfg);
        if (n > 0 && !(br.beta_n < beta_prev))
            throw BracketNotFound("solve_family: beta sequence not strictly decreasing at n = " +
                                  std::to_string(n));
        beta_prev = br.beta_n;
        out.push_back(refine_two_sided(p, br, n, cfg));
    }
    return out;
}

} // namespace selfsim
