#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ltasep/flux.hpp"
#include "ltasep/hydro.hpp"
#include "ltasep/pde.hpp"

using namespace ltasep;

namespace {

RateField parabola_field() {
    auto value = [](double x) { return 0.1 + 1.8 * (x - 2.0 / 3.0) * (x - 2.0 / 3.0); };
    auto slope = [](double x) { return 3.6 * (x - 2.0 / 3.0); };
    return RateField(value, slope, value(0.0), value(1.0), 0.1, {2.0 / 3.0});
}

double linf_vs_theory(const pde::Result& res, const hydro::StationaryProfile& theory,
                      const std::vector<std::pair<double, double>>& excluded) {
    double worst = 0.0;
    for (const auto& p : res.profile.points) {
        bool skip = false;
        for (auto [lo, hi] : excluded)
            if (p.x >= lo && p.x <= hi) skip = true;
        if (skip) continue;
        worst = std::max(worst, std::abs(p.rho - theory.interpolate(p.x)));
    }
    return worst;
}

} // namespace

TEST_CASE("homogeneous low-density steady state is flat at alpha") {
    const RateField f = constant_rate(1.0);
    const hydro::PhaseReport r = hydro::classify(0.2, 0.7, f, 1);
    pde::Options opt;
    opt.cells = 400;
    const pde::Result res = pde::solve_steady(r, f, opt);
    CHECK(res.converged);
    for (const auto& p : res.profile.points) CHECK(std::abs(p.rho - 0.2) < 1e-3);
    CHECK(res.current == doctest::Approx(0.16).epsilon(1e-6));
}

TEST_CASE("interface fluxes are constant across the interior at steady state") {
    const RateField f = bump_rate(0.5, 0.25, 0.5);
    const hydro::PhaseReport r = hydro::classify(0.03, 0.5, f, 3);
    pde::Options opt;
    opt.cells = 500;
    opt.tol = 1e-12;
    const pde::Result res = pde::solve_steady(r, f, opt);
    CHECK(res.converged);
    CHECK(res.flux_spread < 1e-11);
}

TEST_CASE("steady profiles match the closed forms in every phase") {
    const RateField f = parabola_field();
    const int ell = 10;
    pde::Options opt;
    opt.cells = 1000;
    const hydro::PhaseReport mc = hydro::classify(0.2, 0.2, f, ell);
    REQUIRE(mc.phase == hydro::Phase::MaximalCurrent);

    SUBCASE("MC: branch switch at the rate minimum") {
        const pde::Result res = pde::solve_steady(mc, f, opt);
        CHECK(res.converged);
        const double x_min = 2.0 / 3.0;
        const double rho_star = critical_density(ell);
        // value at the bottleneck approaches the critical density
        double at_min = 0.0;
        for (const auto& p : res.profile.points)
            if (std::abs(p.x - x_min) < 1.0 / opt.cells) at_min = p.rho;
        CHECK(std::abs(at_min - rho_star) < 5e-3);
        const hydro::StationaryProfile theory = hydro::stationary_profile(mc, f, 4001);
        CHECK(linf_vs_theory(res, theory, {{x_min - 0.02, x_min + 0.02}}) < 1e-3);
        // upper branch left of the minimum, lower branch right of it
        for (const auto& p : res.profile.points) {
            if (p.x < x_min - 0.02) CHECK(p.rho > rho_star);
            if (p.x > x_min + 0.02) CHECK(p.rho < rho_star);
        }
    }
    SUBCASE("LD, HD and the II variants") {
        const double a_star = mc.alpha_star, b_star = mc.beta_star;
        const std::vector<std::pair<double, double>> configs = {
            {0.5 * a_star, 3.0 * b_star},  // LD_I
            {3.0 * a_star, 0.5 * b_star},  // HD_I
            {0.5 * a_star, 0.8 * b_star},  // II region
        };
        for (auto [a, b] : configs) {
            const hydro::PhaseReport r = hydro::classify(a, b, f, ell);
            const pde::Result res = pde::solve_steady(r, f, opt);
            CHECK(res.converged);
            const hydro::StationaryProfile theory = hydro::stationary_profile(r, f, 4001);
            CHECK(linf_vs_theory(res, theory, {}) < 1e-3);
            CHECK(res.current == doctest::Approx(r.current).epsilon(1e-5));
        }
    }
}

TEST_CASE("coexistence point carries a single stationary interior shock") {
    const RateField f = constant_rate(1.0);
    const hydro::PhaseReport r = hydro::classify(0.2, 0.2, f, 1);
    REQUIRE(r.phase == hydro::Phase::Coexistence);
    pde::Options opt;
    opt.cells = 400;
    const pde::Result res = pde::solve_steady(r, f, opt);
    CHECK(res.converged);
    REQUIRE(res.profile.discontinuities.size() == 1);
    // lower branch left of the shock, upper branch right of it
    const double xs = res.profile.discontinuities[0];
    for (const auto& p : res.profile.points) {
        if (p.x < xs - 0.05) CHECK(p.rho == doctest::Approx(0.2).epsilon(1e-6));
        if (p.x > xs + 0.05) CHECK(p.rho == doctest::Approx(0.8).epsilon(1e-6));
    }
}

TEST_CASE("decreasing Riemann data spreads as a rarefaction fan") {
    const RateField f = constant_rate(1.0);
    const int m = 800;
    std::vector<double> rho0(m);
    for (int i = 0; i < m; ++i) rho0[i] = (i + 0.5) / m < 0.5 ? 0.45 : 0.10;
    const double t = 0.4;
    const auto rho = pde::evolve_free(rho0, f, 1, t);
    // entropy solution: fan between speeds H'(0.45) and H'(0.10) centered at 1/2
    double linf = 0.0, max_jump = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x = (i + 0.5) / m;
        const double s = (x - 0.5) / t;
        double expect;
        if (s <= normalized_flux_deriv(0.45, 1)) expect = 0.45;
        else if (s >= normalized_flux_deriv(0.10, 1)) expect = 0.10;
        else expect = 0.5 * (1.0 - s); // H'(rho) = 1 - 2 rho = s
        linf = std::max(linf, std::abs(rho[i] - expect));
        if (i > 0) max_jump = std::max(max_jump, std::abs(rho[i] - rho[i - 1]));
    }
    CHECK(linf < 0.02);       // first-order smearing only
    CHECK(max_jump < 0.02);   // an expansion shock would jump by 0.35
}

TEST_CASE("viscous correction stays stable and close to the inviscid profile") {
    const RateField f = bump_rate(0.5, 0.25, 0.5);
    const hydro::PhaseReport r = hydro::classify(0.04, 0.5, f, 3);
    pde::Options opt;
    opt.cells = 300;
    opt.viscous = true;
    opt.lattice_spacing = 1.0 / 800.0;
    const pde::Result res = pde::solve_steady(r, f, opt);
    CHECK(res.converged);
    const hydro::StationaryProfile theory = hydro::stationary_profile(r, f, 2001);
    for (const auto& p : res.profile.points)
        CHECK(std::abs(p.rho - theory.interpolate(p.x)) < 5e-3);
}
