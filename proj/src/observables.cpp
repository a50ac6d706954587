#include "selfsim/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "selfsim/ode.hpp"
#include "selfsim/quadrature.hpp"

namespace selfsim {

EnergyReport energy(const ConnectingOrbit& orbit, const IntegratorConfig& cfg) {
    const EquationParams& p = orbit.params;
    if (p.m != 3 || p.l != 1)
        throw std::invalid_argument("energy: the functional is defined for m = 3, l = 1 only");
    if (orbit.profile.nodes.size() < 2)
        throw std::invalid_argument("energy: orbit has no profile");
    (void)cfg;

    const auto& nodes = orbit.profile.nodes;
    const double rho_min = nodes.front().t;
    const double rho_max = nodes.back().t;
    const double sigma0 = 1.0 - rho_max;

    auto integrand = [&](double rho) {
        const PhaseState s = orbit.profile.eval(rho);
        const double c = std::cos(s.u);
        return rho * rho * s.du * s.du - 2.0 * c * c / (1.0 - rho * rho);
    };

    // One GK15 panel per Hermite segment: the panel rule is exact far
    // beyond cubic data, so the error is set by the dense output itself.
    double main = 0.0, err = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const QuadResult q = integrate_gk15(integrand, nodes[i - 1].t, nodes[i].t, 1e-15, 1e-13, 4);
        main += q.value;
        err += q.error_estimate;
    }

    // Endpoint tails.  For converged orbits use the Frobenius behavior
    // (f ~ a rho at 0, f ~ pi/2 - b_sigma... at 1); for synthetic profiles
    // without boundary data fall back to constant extrapolation.
    double tail0, tail1;
    if (orbit.a != 0.0 || orbit.b_rho != 0.0) {
        const double a = orbit.a;
        const double b2 = orbit.b_rho * orbit.b_rho;
        tail0 = -2.0 * rho_min + (3.0 * a * a - 2.0) * rho_min * rho_min * rho_min / 3.0;
        tail1 = b2 * sigma0 * (1.0 - 0.5 * sigma0);
    } else {
        tail0 = rho_min * integrand(rho_min);
        tail1 = sigma0 * integrand(rho_max);
    }

    EnergyReport rep;
    rep.n = orbit.n;
    rep.E = 0.5 * (main + tail0 + tail1);
    rep.quadrature_error_estimate = 0.5 * err + 1e-12;
    rep.converged = true;
    return rep;
}

std::vector<double> energy_ratios(const std::vector<EnergyReport>& reports) {
    if (reports.size() < 2)
        throw std::invalid_argument("energy_ratios: need at least two reports");
    std::vector<double> out;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        if (reports[i].n != reports[i - 1].n + 1)
            throw std::invalid_argument("energy_ratios: reports must have consecutive n");
        out.push_back(reports[i - 1].E / reports[i].E);
    }
    return out;
}

double energy_ratio_limit_m3() { return std::exp(2.0 * M_PI / std::sqrt(7.0)); }

LimitingH limiting_H(const EquationParams& p, double x_end, int samples_per_unit) {
    LimitingH out;
    auto rhs = [&p](double x, const PhaseState& s) {
        const double cothx = 1.0 / std::tanh(x);
        return PhaseState{s.du, (p.m - 2) * cothx * s.du - 2.0 * p.k * s.u};
    };

    const double x0 = 1e-4;
    const double d1 = lightcone_d1(p);
    const int pw = p.m - 1;
    PhaseState s{std::pow(x0, pw) * (1.0 + d1 * x0 * x0),
                 std::pow(x0, pw - 1) * (pw + (pw + 2) * d1 * x0 * x0)};
    double log_scale = 0.0;
    double x = x0;

    const double dx = 1.0 / samples_per_unit;
    IntegratorConfig ic;
    ic.rel_tol = 1e-11;
    ic.h_init = 1e-5;
    ic.h_max = 0.25;
    EventSpec ev;
    ev.track_crossings = true;
    ev.crossing_level = 0.0;

    while (x < x_end - 1e-12) {
        const double x_next = std::min(x + dx, x_end);
        ic.abs_tol = 1e-12 * std::max({std::abs(s.u), std::abs(s.du), 1e-30});
        const Trajectory chunk = integrate(rhs, x, s, x_next, ic, Coordinate::X, ev);
        if (chunk.termination != Termination::ReachedEnd)
            throw std::runtime_error("limiting_H: integration failure");
        for (const auto& e : chunk.events)
            if (e.kind == EventKind::Crossing)
                out.zeros.push_back(e.abscissa);
        x = x_next;
        s = chunk.nodes.back().s;
        const double amp = std::max(std::abs(s.u), std::abs(s.du));
        if (amp > 1e250) {
            s.u /= amp;
            s.du /= amp;
            log_scale += std::log(amp);
        }
        out.xs.push_back(x);
        out.values.push_back(s.u);
        out.log_scales.push_back(log_scale);
    }
    return out;
}

ConditionReport check_condition(int m, int l) {
    if (m % 2 == 0)
        throw std::invalid_argument("check_condition: m must be odd (smooth profiles require odd m)");
    const EquationParams p = EquationParams::make(m, l);
    ConditionReport rep;
    rep.m = m;
    rep.l = l;
    rep.threshold = 0.5 * (std::sqrt(2.0) - 1.0) * (m - 2);
    rep.admissible = static_cast<double>(l) > rep.threshold;

    // Oscillation cross-check: zeros of the limiting equation must keep
    // accumulating with the interval length.
    const LimitingH H = limiting_H(p, 60.0, 8);
    int early = 0, late = 0;
    for (double z : H.zeros)
        (z <= 30.0 ? early : late)++;
    rep.oscillation_check = late > 0;
    return rep;
}

} // namespace selfsim
