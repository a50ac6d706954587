#include "selfsim/integrator.hpp"

#include <cmath>

#include "selfsim/ode.hpp"

namespace selfsim {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights (error estimator).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
    PhaseState y;   // state at t+h
    PhaseState f;   // rhs at t+h (FSAL)
    double err;     // scaled error norm
};

inline PhaseState axpy(const PhaseState& y, double h, double w1, const PhaseState& k1, double w2,
                       const PhaseState& k2, double w3 = 0, const PhaseState& k3 = {}, double w4 = 0,
                       const PhaseState& k4 = {}, double w5 = 0, const PhaseState& k5 = {},
                       double w6 = 0, const PhaseState& k6 = {}) {
    return {y.u + h * (w1 * k1.u + w2 * k2.u + w3 * k3.u + w4 * k4.u + w5 * k5.u + w6 * k6.u),
            y.du + h * (w1 * k1.du + w2 * k2.du + w3 * k3.du + w4 * k4.du + w5 * k5.du + w6 * k6.du)};
}

StepResult dp5_step(const RhsFn& rhs, double t, const PhaseState& y, const PhaseState& k1, double h,
                    double rel_tol, double abs_tol) {
    const PhaseState y2 = axpy(y, h, a21, k1, 0, {});
    const PhaseState k2 = rhs(t + c2 * h, y2);
    const PhaseState y3 = axpy(y, h, a31, k1, a32, k2);
    const PhaseState k3 = rhs(t + c3 * h, y3);
    const PhaseState y4 = axpy(y, h, a41, k1, a42, k2, a43, k3);
    const PhaseState k4 = rhs(t + c4 * h, y4);
    const PhaseState y5 = axpy(y, h, a51, k1, a52, k2, a53, k3, a54, k4);
    const PhaseState k5 = rhs(t + c5 * h, y5);
    const PhaseState y6 = axpy(y, h, a61, k1, a62, k2, a63, k3, a64, k4, a65, k5);
    const PhaseState k6 = rhs(t + h, y6);
    const PhaseState y7 = axpy(y, h, b1, k1, 0, {}, b3, k3, b4, k4, b5, k5, b6, k6);
    const PhaseState k7 = rhs(t + h, y7);

    const double eu =
        h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u + e6 * k6.u + e7 * k7.u);
    const double edu =
        h * (e1 * k1.du + e3 * k3.du + e4 * k4.du + e5 * k5.du + e6 * k6.du + e7 * k7.du);
    const double su = abs_tol + rel_tol * std::max(std::abs(y.u), std::abs(y7.u));
    const double sdu = abs_tol + rel_tol * std::max(std::abs(y.du), std::abs(y7.du));
    const double err = std::sqrt(0.5 * ((eu / su) * (eu / su) + (edu / sdu) * (edu / sdu)));
    return {y7, k7, err};
}

// Hermite interpolation of u (component selected by `deriv`) between nodes.
double hermite_component(const TrajectoryNode& a, const TrajectoryNode& b, double t, bool deriv) {
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2,
                 h11 = s3 - s2;
    if (!deriv)
        return h00 * a.s.u + h10 * h * a.f.u + h01 * b.s.u + h11 * h * b.f.u;
    return h00 * a.s.du + h10 * h * a.f.du + h01 * b.s.du + h11 * h * b.f.du;
}

// Root of g on (a.t, b.t) by bisection on the interpolant; g must change sign.
template <typename G>
double bisect_on_segment(const TrajectoryNode& a, const TrajectoryNode& b, G&& g) {
    double lo = a.t, hi = b.t;
    double glo = g(lo);
    for (int i = 0; i < 80 && std::abs(hi - lo) > 1e-15 * (1.0 + std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((glo < 0) == (gm < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

Trajectory integrate(const RhsFn& rhs, double t0, const PhaseState& s0, double t_end,
                     const IntegratorConfig& cfg, Coordinate coord, const EventSpec& events) {
    Trajectory traj;
    traj.coordinate = coord;

    const double dir = (t_end >= t0) ? 1.0 : -1.0;
    double t = t0;
    PhaseState y = s0;
    PhaseState k1 = rhs(t, y);
    traj.nodes.push_back({t, y, k1});

    double h = std::min(cfg.h_init, std::abs(t_end - t0));
    double err_prev = 1.0;
    bool w_passed = false;

    const double half_pi = 0.5 * M_PI;
    auto w_of = [&](const PhaseState& s) {
        return events.params ? w_value(*events.params, s) : 0.0;
    };

    while (dir * (t_end - t) > 1e-14 * (1.0 + std::abs(t_end))) {
        h = std::min(h, cfg.h_max);
        if (dir * (t + dir * h) > dir * t_end)
            h = std::abs(t_end - t);
        if (h < cfg.h_min) {
            traj.termination = Termination::StepFailure;
            return traj;
        }

        const StepResult r = dp5_step(rhs, t, y, k1, dir * h, cfg.rel_tol, cfg.abs_tol);
        if (!std::isfinite(r.err) || r.err > 1.0) {
            const double fac = std::isfinite(r.err)
                                   ? std::max(0.2, 0.9 * std::pow(r.err, -0.2))
                                   : 0.2;
            h *= fac;
            continue;
        }

        const TrajectoryNode prev = traj.nodes.back();
        const double t_new = t + dir * h;
        const TrajectoryNode node{t_new, r.y, r.f};
        traj.nodes.push_back(node);

        if (events.track_crossings) {
            const double ga = prev.s.u - events.crossing_level;
            const double gb = node.s.u - events.crossing_level;
            if (ga * gb < 0.0) {
                const double tc = bisect_on_segment(prev, node, [&](double tt) {
                    return hermite_component(prev, node, tt, false) - events.crossing_level;
                });
                traj.events.push_back({EventKind::Crossing, tc});
            }
        }
        if (events.track_extrema) {
            if (prev.s.du * node.s.du < 0.0) {
                const double tc = bisect_on_segment(
                    prev, node, [&](double tt) { return hermite_component(prev, node, tt, true); });
                traj.events.push_back({EventKind::Extremum, tc});
            }
        }
        if (events.w_escape && events.params) {
            const double wb = w_of(node.s);
            if (!w_passed && wb > *events.w_escape) {
                w_passed = true;
                const double wa = w_of(prev.s);
                double tc = node.t;
                if (wa < *events.w_escape) {
                    tc = bisect_on_segment(prev, node, [&](double tt) {
                        const PhaseState st{hermite_component(prev, node, tt, false),
                                            hermite_component(prev, node, tt, true)};
                        return w_of(st) - *events.w_escape;
                    });
                }
                traj.events.push_back({EventKind::EscapeThreshold, tc});
            }
            if (wb > *events.w_escape && std::abs(node.s.u) > half_pi) {
                traj.termination =
                    node.s.u > 0 ? Termination::EscapedPlus : Termination::EscapedMinus;
                return traj;
            }
        }

        t = t_new;
        y = r.y;
        k1 = r.f; // FSAL
        const double err = std::max(r.err, 1e-10);
        double fac = 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        err_prev = err;
    }

    traj.termination = Termination::ReachedEnd;
    return traj;
}

LinearEndpoint integrate_linear_renormalized(const RhsFn& rhs, double t0, const PhaseState& s0,
                                             double t_end, double rel_tol, double h_min) {
    LinearEndpoint out;
    const double dir = (t_end >= t0) ? 1.0 : -1.0;
    double t = t0;
    PhaseState y = s0;
    double log_scale = 0.0;

    auto renorm = [&] {
        const double m = std::max(std::abs(y.u), std::abs(y.du));
        if (m > 1e100 || (m > 0 && m < 1e-100)) {
            y.u /= m;
            y.du /= m;
            log_scale += std::log(m);
            return true;
        }
        return false;
    };

    PhaseState k1 = rhs(t, y);
    double h = std::min(1e-6, std::abs(t_end - t0));
    double err_prev = 1.0;

    while (dir * (t_end - t) > 1e-14 * (1.0 + std::abs(t_end))) {
        if (dir * (t + dir * h) > dir * t_end)
            h = std::abs(t_end - t);
        if (h < h_min)
            return out; // ok = false

        // Pure relative control: absolute floor tied to the state scale,
        // which the renormalization keeps near unity.
        const double scale = std::max({std::abs(y.u), std::abs(y.du), 1e-30});
        const StepResult r = dp5_step(rhs, t, y, k1, dir * h, rel_tol, rel_tol * scale * 1e-3);
        if (!std::isfinite(r.err) || r.err > 1.0) {
            h *= std::isfinite(r.err) ? std::max(0.2, 0.9 * std::pow(r.err, -0.2)) : 0.2;
            continue;
        }
        t += dir * h;
        y = r.y;
        if (renorm())
            k1 = rhs(t, y); // linear rhs: rescaled state needs rescaled slope
        else
            k1 = r.f;
        const double err = std::max(r.err, 1e-10);
        double fac = 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
        h *= std::min(5.0, std::max(0.2, fac));
        err_prev = err;
    }
    out.t = t;
    out.s = y;
    out.log_scale = log_scale;
    out.ok = true;
    return out;
}

} // namespace selfsim
