#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "selfsim/observables.hpp"
#include "selfsim/ode.hpp"
#include "selfsim/shooting.hpp"

using namespace selfsim;

namespace {

const double kPi = std::acos(-1.0);

// A constant-equator pseudo-profile (the local minimum of the energy);
// its energy must vanish identically.
ConnectingOrbit equator_orbit() {
    ConnectingOrbit o;
    o.params = EquationParams::make(3, 1);
    o.a = 0.0;
    o.b_rho = 0.0;
    o.profile.coordinate = Coordinate::Rho;
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
        const double rho = 1e-6 + (1.0 - 2e-6) * i / n;
        TrajectoryNode node;
        node.t = rho;
        node.s = {kPi / 2.0, 0.0};
        node.f = {0.0, 0.0};
        o.profile.nodes.push_back(node);
    }
    return o;
}

} // namespace

TEST_CASE("ground-state energy equals pi/4 - 1") {
    const auto p = EquationParams::make(3, 1);
    ShooterConfig cfg;
    const BetaBracket bracket = find_beta_n(p, 0, cfg);
    const ConnectingOrbit orbit = refine_two_sided(p, bracket, 0, cfg);
    const EnergyReport er = energy(orbit);
    CHECK(std::abs(er.E - (kPi / 4.0 - 1.0)) <= 1e-8);
    CHECK(er.converged);
}

TEST_CASE("equator map has zero energy") {
    const EnergyReport er = energy(equator_orbit());
    CHECK(std::abs(er.E) <= 1e-10);
}

TEST_CASE("excited energies and their ratio") {
    const auto p = EquationParams::make(3, 1);
    ShooterConfig cfg;
    cfg.n_max = 1;
    const auto family = solve_family(p, cfg);
    std::vector<EnergyReport> reports;
    for (const auto& o : family)
        reports.push_back(energy(o));
    CHECK(reports[0].E == doctest::Approx(kPi / 4.0 - 1.0).epsilon(1e-6));
    CHECK(reports[1].E == doctest::Approx(-1.97045e-2).epsilon(1e-3));
    const auto ratios = energy_ratios(reports);
    REQUIRE(ratios.size() == 1);
    CHECK(ratios[0] == doctest::Approx(10.891).epsilon(1e-3));
}

TEST_CASE("energy rejects m != 3") {
    const auto p = EquationParams::make(5, 1);
    ShooterConfig cfg;
    cfg.n_max = 0;
    const auto family = solve_family(p, cfg);
    CHECK_THROWS_AS(energy(family[0]), std::invalid_argument);
}

TEST_CASE("energy ratio limit") {
    CHECK(energy_ratio_limit_m3() ==
          doctest::Approx(std::exp(2.0 * kPi / std::sqrt(7.0))).epsilon(1e-15));
}

TEST_CASE("limiting equation oscillates with asymptotic spacing 2 pi / sqrt(7)") {
    const auto p = EquationParams::make(3, 1);
    const LimitingH H = limiting_H(p, 60.0);
    REQUIRE(H.zeros.size() >= 10);
    const std::size_t n = H.zeros.size();
    const double spacing = H.zeros[n - 1] - H.zeros[n - 2];
    CHECK(spacing == doctest::Approx(2.0 * kPi / std::sqrt(7.0)).epsilon(1e-2));
}

TEST_CASE("admissibility grid") {
    // threshold (sqrt(2)-1)(m-2)/2; integer l admissible iff strictly above it.
    const double t = std::sqrt(2.0) - 1.0;
    for (int m : {3, 5, 7, 9})
        for (int l : {1, 2, 3}) {
            const ConditionReport r = check_condition(m, l);
            CHECK(r.threshold == doctest::Approx(t * (m - 2) / 2.0).epsilon(1e-15));
            CHECK(r.admissible == (l > r.threshold));
            CHECK(r.oscillation_check == r.admissible);
        }
    CHECK_THROWS_AS(check_condition(4, 1), std::invalid_argument);
    CHECK_THROWS_AS(check_condition(6, 2), std::invalid_argument);
}

TEST_CASE("inadmissible pair has a non-oscillating limit") {
    // m = 9, l = 1: l < threshold ~ 1.4497, so H must stop oscillating.
    const ConditionReport r = check_condition(9, 1);
    CHECK_FALSE(r.admissible);
    CHECK_FALSE(r.oscillation_check);
}
