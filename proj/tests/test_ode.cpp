#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "selfsim/integrator.hpp"
#include "selfsim/ode.hpp"

using namespace selfsim;

namespace {

const double kPi = std::acos(-1.0);

// Closed-form ground state in rho coordinates (m = 3, l = 1).
double f0(double rho) { return 2.0 * std::atan(rho); }
double f0p(double rho) { return 2.0 / (1.0 + rho * rho); }

// The same orbit in x coordinates, h = f(sech x) - pi/2.
double h0(double x) { return 2.0 * std::atan(1.0 / std::cosh(x)) - kPi / 2.0; }

} // namespace

TEST_CASE("rhs_x matches hand-evaluated values") {
    // coth(ln 3) = (9+1)/(9-1) = 5/4 exactly.
    const auto p = EquationParams::make(3, 1);
    const double x = std::log(3.0);
    const PhaseState s{0.3, 0.2};
    const PhaseState d = rhs_x(p, x, s);
    CHECK(d.u == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(d.du == doctest::Approx(1.25 * 0.2 - std::sin(0.6)).epsilon(1e-13));

    const auto p52 = EquationParams::make(5, 2);
    CHECK(p52.k == doctest::Approx(5.0));
    const PhaseState d2 = rhs_x(p52, x, s);
    CHECK(d2.du == doctest::Approx(3.0 * 1.25 * 0.2 - 5.0 * std::sin(0.6)).epsilon(1e-13));
}

TEST_CASE("rhs_rho annihilates the closed-form ground state") {
    const auto p = EquationParams::make(3, 1);
    for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        const PhaseState s{f0(rho), f0p(rho)};
        const PhaseState d = rhs_rho(p, rho, s);
        const double fpp = -4.0 * rho / ((1.0 + rho * rho) * (1.0 + rho * rho));
        CHECK(d.u == doctest::Approx(f0p(rho)).epsilon(1e-14));
        CHECK(d.du == doctest::Approx(fpp).epsilon(1e-10));
    }
}

TEST_CASE("origin series coefficient against the closed form") {
    const auto p = EquationParams::make(3, 1);
    // 2 atan(rho) = 2 rho (1 - rho^2/3 + ...), so c1 = -1/3 at a = 2.
    CHECK(origin_c1(p, 2.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));

    // Generic (m, l, a): the truncated series satisfies the equation to the
    // order it carries, so the residual of the second derivative drops by
    // >= 3 orders when rho shrinks by one decade.
    for (int m : {3, 5, 7})
        for (int l : {1, 2, 3}) {
            const auto q = EquationParams::make(m, l);
            const double a = 0.7;
            const double c1 = origin_c1(q, a);
            auto residual = [&](double rho) {
                const PhaseState s = series_origin(q, a, rho);
                const PhaseState d = rhs_rho(q, rho, s);
                const double fpp_series =
                    a * (l * (l - 1) * std::pow(rho, l - 2) +
                         c1 * (l + 2) * (l + 1) * std::pow(rho, l));
                return std::abs(d.du - fpp_series);
            };
            CHECK(residual(1e-3) < residual(1e-2) * 2e-3);
        }
}

TEST_CASE("lightcone series coefficients against the closed form") {
    const auto p = EquationParams::make(3, 1);
    // h0 = -x^2/2 (1 - x^2/6 + ...), so beta = -1/2, d1 = -1/6.
    CHECK(lightcone_d1(p) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
    for (double x : {1e-2, 1e-3}) {
        const PhaseState s = series_lightcone(p, -0.5, x);
        CHECK(s.u == doctest::Approx(h0(x)).epsilon(1e-7));
        const double h0p = -2.0 * std::tanh(x) / std::cosh(x) / (1.0 + 1.0 / std::cosh(x) / std::cosh(x));
        CHECK(s.du == doctest::Approx(h0p).epsilon(1e-6));
    }

    // 2 atan(1 - sigma) = pi/2 - sigma (1 + sigma/2 + ...), so e1 = 1/2.
    CHECK(lightcone_rho_e1(p) == doctest::Approx(0.5).epsilon(1e-14));
    for (double sigma : {1e-3, 1e-4}) {
        const PhaseState s = series_lightcone_rho(p, -1.0, 1.0 - sigma);
        CHECK(s.u == doctest::Approx(f0(1.0 - sigma)).epsilon(1e-9));
        CHECK(s.du == doctest::Approx(f0p(1.0 - sigma)).epsilon(1e-6));
    }
}

TEST_CASE("W value and monotonicity along an integrated orbit") {
    const auto p = EquationParams::make(3, 1);
    CHECK(w_value(p, {0.4, 0.3}) ==
          doctest::Approx(0.5 * 0.09 + std::sin(0.4) * std::sin(0.4)).epsilon(1e-14));

    IntegratorConfig cfg;
    const double x0 = cfg.launch_eps_x;
    const PhaseState s0 = series_lightcone(p, 0.3, x0);
    auto rhs = [&p](double x, const PhaseState& s) { return rhs_x(p, x, s); };
    Trajectory traj = integrate(rhs, x0, s0, 20.0, cfg, Coordinate::X);
    REQUIRE(traj.nodes.size() > 10);
    double w_prev = -1.0;
    for (const auto& node : traj.nodes) {
        const double w = w_value(p, node.s);
        CHECK(w >= w_prev - 1e-12 * (1.0 + w));
        w_prev = w;
    }
}

TEST_CASE("beta = -1/2 orbit reproduces the closed form at rel_tol 1e-10") {
    // The connecting orbit rides the stable manifold of the saddle at
    // h = -pi/2; perturbations grow like e^{2x}, so the comparison stops at
    // x = 4 where the forward problem is still well conditioned.
    const auto p = EquationParams::make(3, 1);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-14;
    const double x0 = cfg.launch_eps_x;
    const PhaseState s0 = series_lightcone(p, -0.5, x0);
    auto rhs = [&p](double x, const PhaseState& s) { return rhs_x(p, x, s); };
    Trajectory traj = integrate(rhs, x0, s0, 4.0, cfg, Coordinate::X);
    REQUIRE(traj.termination == Termination::ReachedEnd);
    double max_err = 0.0;
    for (const auto& node : traj.nodes)
        max_err = std::max(max_err, std::abs(node.s.u - h0(node.t)));
    CHECK(max_err <= 1e-9);
}

TEST_CASE("integrator error decreases with the tolerance") {
    const auto p = EquationParams::make(3, 1);
    auto rhs = [&p](double x, const PhaseState& s) { return rhs_x(p, x, s); };
    auto endpoint_err = [&](double rel) {
        IntegratorConfig cfg;
        cfg.rel_tol = rel;
        cfg.abs_tol = rel * 1e-3;
        const PhaseState s0 = series_lightcone(p, -0.5, cfg.launch_eps_x);
        Trajectory traj = integrate(rhs, cfg.launch_eps_x, s0, 4.0, cfg, Coordinate::X);
        return std::abs(traj.nodes.back().s.u - h0(4.0));
    };
    const double coarse = endpoint_err(1e-6);
    const double fine = endpoint_err(1e-10);
    CHECK(fine < coarse);
    CHECK(fine < 1e-9);
}

TEST_CASE("dense output interpolates between nodes") {
    const auto p = EquationParams::make(3, 1);
    IntegratorConfig cfg;
    auto rhs = [&p](double x, const PhaseState& s) { return rhs_x(p, x, s); };
    const PhaseState s0 = series_lightcone(p, -0.5, cfg.launch_eps_x);
    Trajectory traj = integrate(rhs, cfg.launch_eps_x, s0, 4.0, cfg, Coordinate::X);
    for (double x : {0.5, 1.0, 2.0, 3.0, 3.5}) {
        const PhaseState v = traj.eval(x);
        CHECK(v.u == doctest::Approx(h0(x)).epsilon(1e-8));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(EquationParams::make(4, 1), std::invalid_argument);
    CHECK_THROWS_AS(EquationParams::make(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(EquationParams::make(3, 0), std::invalid_argument);
    CHECK(EquationParams::make(7, 2).k == doctest::Approx(7.0));
}
