#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ltasep/flux.hpp"
#include "ltasep/hydro.hpp"

using namespace ltasep;
using namespace ltasep::hydro;

namespace {

// Parabolic rate landscape with lambda(0)=0.9, lambda(1)=0.3, min 0.1 at 2/3:
// lambda(x) = 0.1 + 1.8 (x - 2/3)^2.
RateField parabola_field() {
    auto value = [](double x) { return 0.1 + 1.8 * (x - 2.0 / 3.0) * (x - 2.0 / 3.0); };
    auto slope = [](double x) { return 3.6 * (x - 2.0 / 3.0); };
    return RateField(value, slope, value(0.0), value(1.0), 0.1, {2.0 / 3.0});
}

double j_left(double a, double lam0, int ell) {
    return a * (lam0 - a) / (lam0 + (ell - 1) * a);
}

// Independent route to the critical rate: bisection on J_L(alpha) = J_max.
double critical_rate_by_bisection(double lam_end, double lam_min, int ell) {
    const double jmax = lam_min * peak_normalized_flux(ell);
    double lo = 0.0, hi = lam_end / (1.0 + std::sqrt(static_cast<double>(ell)));
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (j_left(mid, lam_end, ell) < jmax ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("entry density") {
    CHECK(entry_density(0.1, 1.0, 1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(entry_density(0.1, 1.0, 3) == doctest::Approx(0.1 / 1.2).epsilon(1e-15));
    // diverging entrance rate: approaches 1/(ell-1), beyond the physical 1/ell
    const double big = entry_density(1e9, 1.0, 3);
    CHECK(big > 1.0 / 3.0);
    CHECK(big < 0.5 + 1e-9);
    CHECK_THROWS_AS(entry_density(-0.1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("exit densities") {
    SUBCASE("instantaneous exit") {
        const ExitDensities d = exit_densities(1.0, 1.0, 3);
        CHECK(d.rho1_plus == 0.0);
        CHECK(d.rho1 == 0.0);
    }
    SUBCASE("direct evaluation, ell = 3") {
        const ExitDensities d = exit_densities(0.2, 1.0, 3);
        CHECK(d.rho1_plus == doctest::Approx(0.8 / 1.4).epsilon(1e-14));
        CHECK(d.rho1_minus == doctest::Approx(0.2 * 0.8 / 1.4).epsilon(1e-14));
        CHECK(d.rho1 == doctest::Approx((1.0 - 0.2) / 3.0).epsilon(1e-14));
    }
    SUBCASE("1-TASEP high-density boundary") {
        const ExitDensities d = exit_densities(0.3, 1.0, 1);
        CHECK(d.rho1_plus == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(d.rho1 == doctest::Approx(0.7).epsilon(1e-15));
    }
    SUBCASE("closed form (1/ell)(1 - beta/lambda1) for random inputs") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        for (int k = 0; k < 500; ++k) {
            const double lam1 = 0.2 + u(rng);
            const double beta = u(rng) * lam1;
            const int ell = 1 + static_cast<int>(u(rng) * 10);
            const ExitDensities d = exit_densities(beta, lam1, ell);
            CHECK(std::abs(d.rho1 - (1.0 - beta / lam1) / ell) < 1e-12);
        }
    }
}

TEST_CASE("critical rates: homogeneous, defect, inhomogeneous") {
    CHECK(critical_entry_rate(1.0, 1.0, 1) == doctest::Approx(0.5).epsilon(1e-14));
    // single defect, ell = 1, lambda_min = 1/2
    CHECK(critical_entry_rate(1.0, 0.5, 1) ==
          doctest::Approx((1.0 - std::sqrt(0.5)) / 2.0).epsilon(1e-14));
    // four-statistic example (lambda0, lambda1, lambda_min, ell) = (.9,.3,.1,10)
    const double a_star = critical_entry_rate(0.9, 0.1, 10);
    const double b_star = critical_exit_rate(0.3, 0.1, 10);
    CHECK(a_star == doctest::Approx(6.170640342294809e-3).epsilon(1e-12));
    CHECK(b_star == doctest::Approx(7.189393841369587e-3).epsilon(1e-12));
    CHECK(std::abs(a_star - critical_rate_by_bisection(0.9, 0.1, 10)) < 1e-10);
    CHECK(std::abs(b_star - critical_rate_by_bisection(0.3, 0.1, 10)) < 1e-10);
}

TEST_CASE("defining identity J_L(alpha*) = J_max and monotonicity in lambda_min") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 400; ++k) {
        const double lam0 = 0.2 + 1.8 * u(rng);
        const double lmin = lam0 * (0.05 + 0.95 * u(rng));
        const int ell = 1 + static_cast<int>(u(rng) * 12);
        const double a_star = critical_entry_rate(lam0, lmin, ell);
        const double jmax = lmin * peak_normalized_flux(ell);
        CHECK(std::abs(j_left(a_star, lam0, ell) - jmax) < 1e-10);
        // fewer obstructions admit more inflow
        const double lmin2 = lmin * (0.3 + 0.7 * u(rng));
        CHECK(critical_entry_rate(lam0, lmin2, ell) <= a_star + 1e-12);
    }
}

TEST_CASE("boundary currents") {
    const RateField f = constant_rate(1.0);
    const BoundaryCurrents c = boundary_currents(0.1, 0.2, f, 3);
    CHECK(c.left == doctest::Approx(0.075).epsilon(1e-14));
    CHECK(c.max == doctest::Approx(1.0 / (1.0 + std::sqrt(3.0)) / (1.0 + std::sqrt(3.0)))
                       .epsilon(1e-14));
    CHECK(boundary_currents(0.1, 0.1, constant_rate(1.0), 1).max == doctest::Approx(0.25));
    // J_max for (lambda_min, ell) = (0.1, 10)
    const RateField p = parabola_field();
    CHECK(boundary_currents(0.1, 0.1, p, 10).max ==
          doctest::Approx(5.7721539255101725e-3).epsilon(1e-12));
}

TEST_CASE("phase classification, homogeneous 1-TASEP") {
    const RateField f = constant_rate(1.0);
    SUBCASE("LD_I") {
        const PhaseReport r = classify(0.2, 0.7, f, 1);
        CHECK(r.phase == Phase::LowDensityI);
        CHECK(r.current == doctest::Approx(0.16).epsilon(1e-14));
        CHECK(r.alpha_star == doctest::Approx(0.5));
        CHECK(r.beta_star == doctest::Approx(0.5));
    }
    SUBCASE("MC") {
        const PhaseReport r = classify(0.7, 0.7, f, 1);
        CHECK(r.phase == Phase::MaximalCurrent);
        CHECK(r.current == doctest::Approx(0.25).epsilon(1e-14));
    }
    SUBCASE("II subphases resolve by shock direction: smaller current wins") {
        CHECK(classify(0.2, 0.3, f, 1).phase == Phase::LowDensityII);
        CHECK(classify(0.3, 0.2, f, 1).phase == Phase::HighDensityII);
        CHECK(classify(0.3, 0.2, f, 1).current == doctest::Approx(0.16).epsilon(1e-14));
    }
    SUBCASE("coexistence line alpha = beta") {
        const PhaseReport r = classify(0.2, 0.2, f, 1);
        CHECK(r.phase == Phase::Coexistence);
        CHECK(r.current_left == doctest::Approx(r.current_right).epsilon(1e-14));
    }
    SUBCASE("critical boundary tags") {
        CHECK(classify(0.5, 0.7, f, 1).boundary_tag == "alpha-critical");
        CHECK(classify(0.5, 0.5, f, 1).boundary_tag == "triple-point");
    }
}

TEST_CASE("stationary profiles") {
    SUBCASE("homogeneous LD is flat at alpha") {
        const RateField f = constant_rate(1.0);
        const PhaseReport r = classify(0.2, 0.7, f, 1);
        const StationaryProfile prof = stationary_profile(r, f, 21);
        for (const auto& p : prof.points) {
            CHECK(p.rho == doctest::Approx(0.2).epsilon(1e-12));
            CHECK(p.branch == BranchLabel::Lower);
        }
    }
    SUBCASE("homogeneous MC is flat at the critical density") {
        const RateField f = constant_rate(1.0);
        const PhaseReport r = classify(0.7, 0.8, f, 1);
        const StationaryProfile prof = stationary_profile(r, f, 21);
        for (const auto& p : prof.points)
            CHECK(p.rho == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("MC branch structure around the rate minimum, ell = 10") {
        const RateField f = parabola_field();
        const PhaseReport r = classify(0.2, 0.2, f, 10);
        REQUIRE(r.phase == Phase::MaximalCurrent);
        const StationaryProfile prof = stationary_profile(r, f, 301);
        const double rho_star = critical_density(10);
        const double x_min = 2.0 / 3.0;
        bool saw_min = false;
        for (const auto& p : prof.points) {
            if (std::abs(p.x - x_min) < 1e-12) {
                // branches merge: the profile passes through rho* exactly
                CHECK(p.rho == doctest::Approx(rho_star).epsilon(1e-12));
                saw_min = true;
            } else if (p.x < x_min) {
                CHECK(p.branch == BranchLabel::Upper);
                CHECK(p.rho > rho_star);
            } else {
                CHECK(p.branch == BranchLabel::Lower);
                CHECK(p.rho < rho_star);
            }
        }
        CHECK(saw_min);
    }
    SUBCASE("flux constancy and branch ordering on every labeled point") {
        const RateField f = parabola_field();
        for (auto [a, b] : {std::pair{0.004, 0.02}, {0.02, 0.004}, {0.05, 0.06}}) {
            const PhaseReport r = classify(a, b, f, 10);
            const StationaryProfile prof = stationary_profile(r, f, 200);
            for (const auto& p : prof.points) {
                if (p.branch == BranchLabel::Indeterminate) continue;
                CHECK(std::abs(f(p.x) * normalized_flux(p.rho, 10) - r.current) < 1e-10);
                if (p.branch == BranchLabel::Lower) CHECK(p.rho <= critical_density(10) + 1e-12);
                if (p.branch == BranchLabel::Upper) CHECK(p.rho >= critical_density(10) - 1e-12);
            }
        }
    }
    SUBCASE("boundary rate minimum: MC profile is all lower branch") {
        const RateField f = linear_rate(0.36); // minimum at x = 0
        const PhaseReport r = classify(0.8, 0.8, f, 1);
        REQUIRE(r.phase == Phase::MaximalCurrent);
        const StationaryProfile prof = stationary_profile(r, f, 101);
        for (const auto& p : prof.points)
            if (p.x > 1e-12) {
                CHECK(p.branch == BranchLabel::Lower);
                CHECK(p.rho <= critical_density(1) + 1e-12);
            }
    }
    SUBCASE("two global minima leave the middle segment indeterminate") {
        const RateField f = two_bump_rate(0.3, 0.7, 0.08, 0.5);
        const PhaseReport r = classify(1.0, 1.0, f, 1);
        REQUIRE(r.phase == Phase::MaximalCurrent);
        const StationaryProfile prof = stationary_profile(r, f, 501);
        for (const auto& p : prof.points) {
            if (p.x < 0.3 - 1e-9) CHECK(p.branch == BranchLabel::Upper);
            else if (p.x > 0.7 + 1e-9) CHECK(p.branch == BranchLabel::Lower);
            else if (p.x > 0.3 + 1e-9 && p.x < 0.7 - 1e-9)
                CHECK(p.branch == BranchLabel::Indeterminate);
        }
        CHECK(prof.discontinuities.size() == 2);
    }
}

TEST_CASE("coexistence curve") {
    SUBCASE("symmetric rates give beta = alpha") {
        for (int ell : {1, 2, 5})
            CHECK(coexistence_beta(1.0, 1.0, ell, 0.05, 0.8) ==
                  doctest::Approx(0.05).epsilon(1e-10));
    }
    SUBCASE("linear rate function, ell = 1, s = 0.36, alpha = 0.1") {
        const double s = 0.36;
        const double beta = coexistence_beta(1.0 - s, 1.0, 1, 0.1, 1.0 - s);
        CHECK(beta == doctest::Approx(0.09302948509750736).epsilon(1e-10));
        // the defining relation alpha(1 - alpha - s) = beta(1 - beta)(1 - s)
        CHECK(std::abs(0.1 * (1.0 - 0.1 - s) - beta * (1.0 - beta) * (1.0 - s)) < 1e-12);
    }
    SUBCASE("alpha at the critical value maps to beta*") {
        const RateField f = parabola_field();
        const double a_star = critical_entry_rate(f.lambda0(), f.lambda_min(), 10);
        const double b_star = critical_exit_rate(f.lambda1(), f.lambda_min(), 10);
        CHECK(coexistence_beta(f.lambda0(), f.lambda1(), 10, a_star, f.lambda_min()) ==
              doctest::Approx(b_star).epsilon(1e-9));
    }
    CHECK_THROWS_AS(coexistence_beta(1.0, 1.0, 1, 0.9, 1.0), std::invalid_argument);
}

TEST_CASE("boundary table rows and balance identities") {
    SUBCASE("LD row, ell = 1") {
        const PhaseReport r = classify(0.1, 0.7, constant_rate(1.0), 1);
        REQUIRE(r.phase == Phase::LowDensityI);
        CHECK(r.rho0 == doctest::Approx(0.1).epsilon(1e-14));
        CHECK(r.rho1_plus == doctest::Approx(0.09 / 0.7).epsilon(1e-14));
        CHECK(r.rho1_minus == doctest::Approx(0.09).epsilon(1e-14));
    }
    SUBCASE("HD row matches the exit split densities") {
        const PhaseReport r = classify(0.5, 0.04, constant_rate(1.0), 3);
        REQUIRE(r.phase == Phase::HighDensityI);
        const ExitDensities d = exit_densities(0.04, 1.0, 3);
        CHECK(r.rho1_plus == doctest::Approx(d.rho1_plus).epsilon(1e-14));
        CHECK(r.rho1 == doctest::Approx(d.rho1).epsilon(1e-13));
    }
    SUBCASE("MC row") {
        const RateField f = bump_rate(0.5, 0.2, 0.5);
        const PhaseReport r = classify(0.5, 0.4, f, 3);
        REQUIRE(r.phase == Phase::MaximalCurrent);
        CHECK(r.rho1_minus ==
              doctest::Approx(f.lambda_min() * peak_normalized_flux(3) / f.lambda1())
                  .epsilon(1e-13));
    }
    SUBCASE("universal balances J_c = alpha(1 - ell rho0) = beta rho1+ = lambda1 rho1-") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 300; ++k) {
            const double depth = 0.2 + 0.6 * u(rng);
            const RateField f = bump_rate(0.3 + 0.4 * u(rng), 0.1 + 0.15 * u(rng), depth);
            const int ell = 1 + static_cast<int>(u(rng) * 5);
            const double alpha = 0.02 + u(rng);
            const double beta = 0.02 + u(rng);
            const PhaseReport r = classify(alpha, beta, f, ell);
            CHECK(std::abs(r.current - alpha * (1.0 - ell * r.rho0)) < 1e-10);
            CHECK(std::abs(r.current - beta * r.rho1_plus) < 1e-10);
            CHECK(std::abs(r.current - f.lambda1() * r.rho1_minus) < 1e-10);
            // hole-current balance at the entrance in the LD rows
            if (r.low_density()) {
                const double hole0 = 1.0 - ell * r.rho0;
                CHECK(std::abs(hole_current(hole0, f.lambda0(), ell) - alpha * hole0) < 1e-12);
            }
        }
    }
}

TEST_CASE("special-case critical rate formulas") {
    SUBCASE("defect lattice, ell = 1: alpha* = (1 - sqrt(1 - lambda_min))/2") {
        for (double lmin : {0.1, 0.25, 0.5, 0.75, 0.95}) {
            const double expected = (1.0 - std::sqrt(1.0 - lmin)) / 2.0;
            CHECK(critical_entry_rate(1.0, lmin, 1) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("linear rate function, ell = 1: alpha* = (1-s)/2, beta* = (1-sqrt(s))/2") {
        for (double s : {0.1, 0.36, 0.5, 0.8}) {
            CHECK(critical_entry_rate(1.0 - s, 1.0 - s, 1) ==
                  doctest::Approx((1.0 - s) / 2.0).epsilon(1e-12));
            CHECK(critical_exit_rate(1.0, 1.0 - s, 1) ==
                  doctest::Approx((1.0 - std::sqrt(s)) / 2.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("phase scan covers all four regions") {
    const RateField f = parabola_field();
    std::vector<double> alphas, betas;
    for (int i = 1; i <= 30; ++i) {
        alphas.push_back(0.012 * i / 30.0);
        betas.push_back(0.014 * i / 30.0);
    }
    const auto scan = phase_scan(f, 10, alphas, betas);
    int ld = 0, hd = 0, mc = 0;
    for (const auto& p : scan) {
        if (p.phase == Phase::LowDensityI || p.phase == Phase::LowDensityII) ++ld;
        if (p.phase == Phase::HighDensityI || p.phase == Phase::HighDensityII) ++hd;
        if (p.phase == Phase::MaximalCurrent) ++mc;
    }
    CHECK(ld > 0);
    CHECK(hd > 0);
    CHECK(mc > 0);
    CHECK(scan.size() == alphas.size() * betas.size());
}
