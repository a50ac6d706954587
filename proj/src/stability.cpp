#include "selfsim/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <string>

#include "selfsim/integrator.hpp"
#include "selfsim/ode.hpp"
#include "selfsim/quadrature.hpp"

namespace selfsim {

namespace {

void require_m3l1(const ConnectingOrbit& profile, const char* who) {
    if (profile.params.m != 3 || profile.params.l != 1)
        throw std::invalid_argument(std::string(who) +
                                    ": linearization implemented for m = 3, l = 1 only");
}

// Interpolated cos(2 f_n); clamped to the profile span (the launch offsets
// of the eigenruns can undercut it by < 1e-6, where cos(2f) is constant to
// O(sigma^2)).
double cos2f_interp(const ConnectingOrbit& profile, double rho) {
    const double lo = profile.profile.nodes.front().t;
    const double hi = profile.profile.nodes.back().t;
    return std::cos(2.0 * profile.profile.eval(std::clamp(rho, lo, hi)).u);
}

double potential(const ConnectingOrbit& profile, double lambda2, double rho) {
    const double om = 1.0 - rho * rho;
    return (1.0 - lambda2) / (om * om) - 2.0 * cos2f_interp(profile, rho) / (rho * rho * om);
}

} // namespace

PhaseState eigen_rhs(const ConnectingOrbit& profile, double lambda2, double rho,
                     const PhaseState& s) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("eigen_rhs: rho must lie in (0,1)");
    return {s.du, -(2.0 / rho) * s.du - potential(profile, lambda2, rho) * s.u};
}

namespace {

struct SideEndpoints {
    PhaseState left, right;
    bool ok = false;
};

// Launch series: v ~ rho (1 + u1 rho^2) at 0, v ~ sigma^gamma (1 + g1 sigma) at 1.
PhaseState launch_left(const ConnectingOrbit& profile, double lambda2, double rho) {
    const double a = profile.a;
    const double u1 = (1.0 + lambda2 - 4.0 * a * a) / 10.0;
    return {rho * (1.0 + u1 * rho * rho), 1.0 + 3.0 * u1 * rho * rho};
}

PhaseState launch_right(double lambda2, double rho) {
    // The overall sigma^gamma factor is dropped: the problem is linear, so
    // only the direction matters, and the factor underflows for large
    // lambda (gamma ~ 160 at lambda^2 = 1e5).
    const double gamma = 0.5 * (1.0 + std::sqrt(lambda2));
    const double g1 = (gamma * gamma + gamma - 1.0) / (2.0 * gamma);
    const double sig = 1.0 - rho;
    return {1.0 + g1 * sig, -(gamma + (gamma + 1.0) * g1 * sig) / sig};
}

double right_offset(double lambda2, const EigenShotConfig& cfg) {
    // Keep the series parameter gamma*sigma small for steep exponents.
    const double gamma = 0.5 * (1.0 + std::sqrt(lambda2));
    return std::min(cfg.endpoint_offset, 1e-3 / std::max(gamma, 1.0));
}

SideEndpoints shoot_both(const ConnectingOrbit& profile, double lambda2,
                         const EigenShotConfig& cfg) {
    SideEndpoints out;
    const double off_l = cfg.endpoint_offset;
    const double off_r = right_offset(lambda2, cfg);
    auto rhs = [&](double rho, const PhaseState& s) { return eigen_rhs(profile, lambda2, rho, s); };

    const LinearEndpoint L = integrate_linear_renormalized(
        rhs, off_l, launch_left(profile, lambda2, off_l), cfg.match_point, cfg.rel_tol);
    const LinearEndpoint R = integrate_linear_renormalized(
        rhs, 1.0 - off_r, launch_right(lambda2, 1.0 - off_r), cfg.match_point, cfg.rel_tol);
    if (!L.ok || !R.ok)
        return out;
    out.left = L.s;
    out.right = R.s;
    out.ok = true;
    return out;
}

} // namespace

MismatchResult eigen_mismatch(const ConnectingOrbit& profile, double lambda2,
                              const EigenShotConfig& cfg) {
    require_m3l1(profile, "eigen_mismatch");
    if (!(lambda2 > 0.0))
        throw std::invalid_argument("eigen_mismatch: lambda^2 must be positive");
    MismatchResult res;
    const SideEndpoints ends = shoot_both(profile, lambda2, cfg);
    if (!ends.ok) {
        res.ok = false;
        return res;
    }
    const PhaseState& L = ends.left;
    const PhaseState& R = ends.right;
    const double nl = std::hypot(L.u, L.du);
    const double nr = std::hypot(R.u, R.du);
    res.value = (L.du * R.u - L.u * R.du) / (nl * nr);
    res.node_collision = std::abs(L.u) < 1e-8 * nl || std::abs(R.u) < 1e-8 * nr;
    if (!std::isfinite(res.value))
        res.ok = false;
    return res;
}

namespace {

// Illinois (modified false position) root polish inside a sign-change bracket.
double polish_root(const ConnectingOrbit& profile, const EigenShotConfig& cfg, double lo,
                   double flo, double hi, double fhi) {
    for (int i = 0; i < 80; ++i) {
        if (hi - lo <= cfg.secant_tol * hi)
            break;
        double mid = (lo * fhi - hi * flo) / (fhi - flo);
        const double span = hi - lo;
        if (!(mid > lo + 1e-3 * span) || !(mid < hi - 1e-3 * span))
            mid = 0.5 * (lo + hi);
        const MismatchResult m = eigen_mismatch(profile, mid, cfg);
        if (!m.ok)
            throw CountMismatch("find_spectrum: mismatch evaluation failed during polish");
        if ((m.value < 0) == (flo < 0)) {
            lo = mid;
            flo = m.value;
            fhi *= 0.5;
        } else {
            hi = mid;
            fhi = m.value;
            flo *= 0.5;
        }
    }
    return 0.5 * (lo + hi);
}

// Evaluate the mismatch on a batch of scan points, fanning out over at most
// cfg.threads workers.
std::vector<MismatchResult> scan_batch(const ConnectingOrbit& profile,
                                       const std::vector<double>& points,
                                       const EigenShotConfig& cfg) {
    std::vector<MismatchResult> out(points.size());
    const int threads = std::max(1, cfg.threads);
    if (threads == 1 || points.size() < 2) {
        for (std::size_t i = 0; i < points.size(); ++i)
            out[i] = eigen_mismatch(profile, points[i], cfg);
        return out;
    }
    std::vector<std::future<void>> futs;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < threads; ++w)
        futs.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next++; i < points.size(); i = next++)
                out[i] = eigen_mismatch(profile, points[i], cfg);
        }));
    for (auto& f : futs)
        f.get();
    return out;
}

} // namespace

SpectrumResult find_spectrum(const ConnectingOrbit& profile, const EigenShotConfig& cfg) {
    require_m3l1(profile, "find_spectrum");
    SpectrumResult out;
    out.n = profile.n;

    // Consecutive eigenvalues are separated by a factor ~ e^{4 pi/sqrt 7}
    // ~ 115, and the mismatch varies slowly between them, so the grid can be
    // much coarser in the expensive high decades (run cost grows like
    // sqrt(lambda^2)).
    const double factor_lo = std::pow(10.0, 1.0 / cfg.points_per_decade);
    const double factor_hi = std::pow(10.0, 1.0 / std::min(6, cfg.points_per_decade));
    auto step = [&](double l2) { return l2 < 1e4 ? factor_lo : factor_hi; };
    std::vector<double> roots;

    double lo = cfg.lambda2_min;
    double ceiling = cfg.lambda2_max;
    double carry_l2 = lo;
    MismatchResult carry = eigen_mismatch(profile, lo, cfg);
    if (!carry.ok)
        throw CountMismatch("find_spectrum: mismatch evaluation failed at scan start");

    while (true) {
        std::vector<double> points;
        for (double l2 = carry_l2 * step(carry_l2); l2 < ceiling * (1.0 - 1e-12);
             l2 *= step(l2))
            points.push_back(l2);
        points.push_back(ceiling);
        const std::vector<MismatchResult> vals = scan_batch(profile, points, cfg);
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!vals[i].ok)
                throw CountMismatch("find_spectrum: mismatch evaluation failed at lambda^2 = " +
                                    std::to_string(points[i]));
            if (carry.value * vals[i].value < 0.0)
                roots.push_back(
                    polish_root(profile, cfg, carry_l2, carry.value, points[i], vals[i].value));
            carry = vals[i];
            carry_l2 = points[i];
        }
        if (static_cast<int>(roots.size()) >= out.n || ceiling >= cfg.lambda2_hard_cap)
            break;
        ceiling = std::min(ceiling * 10.0, cfg.lambda2_hard_cap);
    }

    if (static_cast<int>(roots.size()) != out.n)
        throw CountMismatch("find_spectrum: found " + std::to_string(roots.size()) +
                            " eigenvalues for n = " + std::to_string(out.n));

    std::sort(roots.begin(), roots.end());
    out.eigenvalues = roots;

    const GaugeMode g = gauge_mode(profile);
    out.gauge_residual = g.max_rel_residual;
    out.gauge_zero_count = g.zero_count;
    return out;
}

GaugeMode gauge_mode(const ConnectingOrbit& profile, int grid_points) {
    require_m3l1(profile, "gauge_mode");
    GaugeMode out;

    auto fppp = [&](double rho, double f, double fp, double fpp) {
        const double om = 1.0 - rho * rho;
        const double s2 = std::sin(2.0 * f), c2 = std::cos(2.0 * f);
        return 2.0 / (rho * rho) * fp - 2.0 / rho * fpp + 2.0 * c2 * fp / (rho * rho * om) -
               s2 * (2.0 * rho - 4.0 * rho * rho * rho) / (rho * rho * rho * rho * om * om);
    };

    // Zeros of v = rho sqrt(1-rho^2) f' on (0,1) are the extrema of f_n:
    // count sign changes of f' over the full interior node set.
    int zeros = 0;
    double prev_fp = 0.0;
    bool have_prev = false;
    for (const auto& node : profile.profile.nodes) {
        if (have_prev && prev_fp * node.s.du < 0.0)
            ++zeros;
        prev_fp = node.s.du;
        have_prev = true;
    }
    out.zero_count = zeros;

    // Residual of the lambda = 0 equation at the trajectory nodes, where
    // (f, f', f'') carry the integrator's own accuracy.
    double worst = 0.0;
    for (const auto& node : profile.profile.nodes) {
        const double rho = node.t;
        if (rho < 0.01 || rho > 0.99)
            continue;
        const double f = node.s.u, fp = node.s.du, fpp = node.f.du;
        const double s = std::sqrt(1.0 - rho * rho);
        const double sp = -rho / s;
        const double spp = -1.0 / (s * s * s);
        const double v = rho * s * fp;
        const double vp = (s + rho * sp) * fp + rho * s * fpp;
        const double vpp = (2.0 * sp + rho * spp) * fp + 2.0 * (s + rho * sp) * fpp +
                           rho * s * fppp(rho, f, fp, fpp);
        const double om = 1.0 - rho * rho;
        const double P = 1.0 / (om * om) - 2.0 * std::cos(2.0 * f) / (rho * rho * om);
        const double R = vpp + 2.0 / rho * vp + P * v;
        const double scale =
            std::max({std::abs(vpp), std::abs(2.0 / rho * vp), std::abs(P * v), 1e-30});
        worst = std::max(worst, std::abs(R) / scale);
    }
    out.max_rel_residual = worst;

    for (int i = 1; i <= grid_points; ++i) {
        const double rho = static_cast<double>(i) / (grid_points + 1);
        const PhaseState st = profile.profile.eval(
            std::clamp(rho, profile.profile.nodes.front().t, profile.profile.nodes.back().t));
        out.rho.push_back(rho);
        out.v.push_back(rho * std::sqrt(1.0 - rho * rho) * st.du);
    }
    return out;
}

EigenFunction eigenfunction(const ConnectingOrbit& profile, double lambda2,
                            const EigenShotConfig& cfg, int grid_points) {
    require_m3l1(profile, "eigenfunction");
    EigenFunction out;
    out.lambda2 = lambda2;

    const double off_l = cfg.endpoint_offset;
    const double off_r = right_offset(lambda2, cfg);
    auto rhs = [&](double rho, const PhaseState& s) { return eigen_rhs(profile, lambda2, rho, s); };

    IntegratorConfig ic;
    ic.rel_tol = cfg.rel_tol;
    ic.abs_tol = 1e-280;
    ic.h_init = 1e-6;
    ic.h_max = 0.01;
    const Trajectory L = integrate(rhs, off_l, launch_left(profile, lambda2, off_l),
                                   cfg.match_point, ic, Coordinate::Rho);
    const Trajectory R = integrate(rhs, 1.0 - off_r, launch_right(lambda2, 1.0 - off_r),
                                   cfg.match_point, ic, Coordinate::Rho);
    if (L.termination != Termination::ReachedEnd || R.termination != Termination::ReachedEnd)
        throw CountMismatch("eigenfunction: side integration failed");

    const double scale = L.nodes.back().s.u / R.nodes.back().s.u;
    double vmax = 0.0;
    for (int i = 0; i <= grid_points; ++i) {
        const double rho = off_l + (1.0 - off_r - off_l) * static_cast<double>(i) / grid_points;
        const double v = (rho <= cfg.match_point) ? L.eval(rho).u : scale * R.eval(rho).u;
        out.rho.push_back(rho);
        out.v.push_back(v);
        vmax = std::max(vmax, std::abs(v));
    }
    for (double& v : out.v)
        v /= vmax;
    return out;
}

double hessian_form(const ConnectingOrbit& profile, const std::vector<double>& rho,
                    const std::vector<double>& v) {
    require_m3l1(profile, "hessian_form");
    if (rho.size() != v.size() || rho.size() < 3)
        throw std::invalid_argument("hessian_form: need matching sampled grids (>= 3 points)");

    double total = 0.0;
    for (std::size_t i = 1; i < rho.size(); ++i) {
        const double r0 = rho[i - 1], r1 = rho[i];
        if (!(r1 > r0))
            throw std::invalid_argument("hessian_form: rho grid must be increasing");
        const double slope = (v[i] - v[i - 1]) / (r1 - r0);
        auto seg = [&](double r) {
            const double vv = v[i - 1] + slope * (r - r0);
            const double om = 1.0 - r * r;
            return r * r * slope * slope + 2.0 * cos2f_interp(profile, r) * vv * vv / om;
        };
        // Keep the quadrature off the 1/(1-rho) endpoint itself.
        const double r1c = std::min(r1, 1.0 - 1e-12);
        total += integrate_gk15(seg, std::max(r0, 1e-12), r1c, 1e-12, 1e-10, 64).value;
    }
    return 0.5 * total;
}

} // namespace selfsim
