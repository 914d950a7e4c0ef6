#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ltasep/exact.hpp"
#include "ltasep/simulate.hpp"

using namespace ltasep;
using namespace ltasep::sim;

TEST_CASE("single-site birth-death balance") {
    ModelSpec spec(1, 1, 1.0, 1.0, RateProfile({1.0}), Geometry::Open, 0, 99);
    const SimStats st = run_tasep(spec, 10000, 400000);
    CHECK(std::abs(st.density(1) - 0.5) < std::max(3.0 * st.density_stderr(1), 0.01));
    CHECK(st.entry_count > 0);
    CHECK(st.exit_count > 0);
}

TEST_CASE("same seed gives bit-identical statistics") {
    ModelSpec spec(40, 2, 0.3, 0.4, RateProfile(std::vector<double>(40, 1.0)), Geometry::Open, 0,
                   1234);
    const SimStats a = run_tasep(spec, 5000, 50000);
    const SimStats b = run_tasep(spec, 5000, 50000);
    CHECK(a.elapsed == b.elapsed);
    CHECK(a.occupancy_time == b.occupancy_time);
    CHECK(a.hop_counts == b.hop_counts);
    ModelSpec spec2 = spec;
    spec2.seed = 1235;
    const SimStats c = run_tasep(spec2, 5000, 50000);
    CHECK(a.elapsed != c.elapsed);
}

TEST_CASE("gap invariant holds along random trajectories") {
    std::mt19937_64 seeder(5);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 6 + static_cast<int>(seeder() % 12);
        const int ell = 1 + static_cast<int>(seeder() % 3);
        std::vector<double> rates(n);
        for (auto& r : rates) r = 0.5 + (seeder() % 1000) / 666.0;
        const bool ring = rep % 3 == 2;
        const int m = ring ? std::max(1, n / (2 * ell)) : 0;
        ModelSpec spec(n, ell, 0.4, 0.6, RateProfile(rates),
                       ring ? Geometry::Ring : Geometry::Open, m, seeder());
        Simulator simulator(spec);
        Rng rng(spec.seed);
        for (int e = 0; e < 400; ++e) {
            const Event ev = simulator.step(rng);
            if (ev.type == Event::Type::None) break;
            CHECK(simulator.state().valid());
        }
        if (ring) CHECK(simulator.particle_count() == m);
    }
}

TEST_CASE("next_event single-step API") {
    ModelSpec spec(10, 2, 0.5, 0.5, RateProfile(std::vector<double>(10, 1.0)), Geometry::Open, 0,
                   7);
    LatticeState state;
    state.num_sites = 10;
    state.particle_size = 2;
    state.geometry = Geometry::Open;
    Rng rng(7);

    SUBCASE("empty lattice admits only entry") {
        const Event ev = next_event(state, spec, rng);
        CHECK(ev.type == Event::Type::Entry);
        CHECK(state.positions == std::vector<int>{1});
        CHECK(state.time > 0.0);
    }
    SUBCASE("single particle at N: first move is entry or exit, never a hop") {
        state.positions = {10};
        const Event ev = next_event(state, spec, rng);
        CHECK((ev.type == Event::Type::Entry || ev.type == Event::Type::Exit));
    }
    SUBCASE("fully packed ring is absorbing") {
        ModelSpec ring(10, 2, 0, 0, RateProfile(std::vector<double>(10, 1.0)), Geometry::Ring, 5,
                       7);
        LatticeState full;
        full.num_sites = 10;
        full.particle_size = 2;
        full.geometry = Geometry::Ring;
        full.positions = {1, 3, 5, 7, 9};
        const Event ev = next_event(full, ring, rng);
        CHECK(ev.type == Event::Type::None);
        CHECK(full.positions == std::vector<int>{1, 3, 5, 7, 9});
    }
}

TEST_CASE("open-geometry bond currents agree across the lattice") {
    ModelSpec spec(30, 1, 0.25, 0.6, RateProfile(std::vector<double>(30, 1.0)), Geometry::Open, 0,
                   321);
    const SimStats st = run_tasep(spec, 100000, 2000000);
    const double j_exit = st.bond_current(30);
    for (int bond = 0; bond <= 30; ++bond) {
        const double se = st.bond_current_stderr(bond);
        CHECK(std::abs(st.bond_current(bond) - j_exit) < std::max(3.0 * (se + 1e-9), 0.012));
    }
}

TEST_CASE("simulator matches exact enumeration on a small lattice") {
    ModelSpec spec(8, 1, 0.2, 0.7, RateProfile(std::vector<double>(8, 1.0)), Geometry::Open, 0,
                   2024);
    const auto dist = exact::stationary_distribution(spec);
    const auto space = exact::StateSpace::enumerate(8, 1, Geometry::Open);
    const auto dens = exact::site_densities(dist.pi, space);
    const SimStats st = run_tasep(spec, 100000, 1500000);
    for (int s = 1; s <= 8; ++s)
        CHECK(std::abs(st.density(s) - dens[s - 1]) <
              std::max(3.0 * st.density_stderr(s), 0.01));
}

TEST_CASE("zrp state mapping is a bijection") {
    std::mt19937_64 seeder(13);
    for (int rep = 0; rep < 50; ++rep) {
        const int ell = 1 + static_cast<int>(seeder() % 3);
        const int m = 1 + static_cast<int>(seeder() % 4);
        const int n = m * ell + 1 + static_cast<int>(seeder() % 8);
        // random valid ring state
        std::vector<int> gaps(m, 0);
        int spare = n - m * ell;
        for (int i = 0; i < m && spare > 0; ++i) {
            const int take = static_cast<int>(seeder() % (spare + 1));
            gaps[i] = take;
            spare -= take;
        }
        gaps[m - 1] += spare;
        ZrpState z;
        z.num_sites = n;
        z.particle_size = ell;
        z.anchor = 1 + static_cast<int>(seeder() % n);
        z.gaps.assign(gaps.begin(), gaps.end());
        REQUIRE(z.valid());
        const LatticeState lat = z.to_lattice();
        CHECK(lat.valid());
        CHECK(static_cast<int>(lat.positions.size()) == m);
        const ZrpState back = ZrpState::from_lattice(lat);
        CHECK(back.valid());
        // the gap multiset is rotation-invariant; round trip through the
        // canonical anchor (smallest position) must reproduce the lattice
        CHECK(back.to_lattice().positions == lat.positions);
    }
}

TEST_CASE("zrp dynamics") {
    SUBCASE("fully packed ring never moves") {
        ModelSpec spec(4, 2, 0, 0, RateProfile(std::vector<double>(4, 1.0)), Geometry::Ring, 2, 5);
        const SimStats st = run_zrp(spec, 10, 10);
        CHECK(st.absorbing_reached);
        for (auto c : st.hop_counts) CHECK(c == 0);
        // single particle filling the whole ring: gap stays zero forever
        ModelSpec one(3, 3, 0, 0, RateProfile(std::vector<double>(3, 1.0)), Geometry::Ring, 1, 5);
        const SimStats st1 = run_zrp(one, 10, 10);
        CHECK(st1.absorbing_reached);
        for (auto c : st1.hop_counts) CHECK(c == 0);
    }
    SUBCASE("homogeneous ring: uniform density M/N by symmetry") {
        ModelSpec spec(12, 2, 0, 0, RateProfile(std::vector<double>(12, 1.0)), Geometry::Ring, 3,
                       77);
        const SimStats st = run_zrp(spec, 50000, 1000000);
        for (int s = 1; s <= 12; ++s)
            CHECK(std::abs(st.density(s) - 0.25) < std::max(3.0 * st.density_stderr(s), 0.012));
    }
    SUBCASE("inhomogeneous ring: ZRP and direct TASEP samplers agree") {
        RateProfile rates({1.0, 0.6, 1.4, 0.8, 1.2, 1.0, 0.7, 1.3, 0.9, 1.1, 1.0, 0.75});
        ModelSpec spec(12, 2, 0, 0, rates, Geometry::Ring, 3, 4242);
        const SimStats zrp = run_zrp(spec, 200000, 2000000);
        const SimStats tasep = run_tasep(spec, 200000, 2000000);
        for (int s = 1; s <= 12; ++s) {
            const double se =
                std::hypot(zrp.density_stderr(s), tasep.density_stderr(s));
            CHECK(std::abs(zrp.density(s) - tasep.density(s)) < std::max(3.0 * se, 0.012));
        }
        // particle conservation in both samplers: densities sum to M
        double sum_z = 0, sum_t = 0;
        for (int s = 1; s <= 12; ++s) {
            sum_z += zrp.density(s);
            sum_t += tasep.density(s);
        }
        CHECK(sum_z == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(sum_t == doctest::Approx(3.0).epsilon(1e-9));
    }
}

TEST_CASE("zrp sampler agrees with exact enumeration on a small ring") {
    RateProfile rates({1.0, 0.5, 2.0, 1.0, 1.5, 0.7});
    ModelSpec spec(6, 2, 0, 0, rates, Geometry::Ring, 2, 606);
    const auto space = exact::StateSpace::enumerate(6, 2, Geometry::Ring, 2);
    const auto dist = exact::stationary_distribution(spec, space);
    const auto dens = exact::site_densities(dist.pi, space);
    const SimStats st = run_zrp(spec, 100000, 1500000);
    for (int s = 1; s <= 6; ++s)
        CHECK(std::abs(st.density(s) - dens[s - 1]) <
              std::max(3.0 * st.density_stderr(s), 0.01));
}

TEST_CASE("stats merge combines replicas") {
    ModelSpec a(10, 1, 0.3, 0.5, RateProfile(std::vector<double>(10, 1.0)), Geometry::Open, 0, 1);
    ModelSpec b = a;
    b.seed = split_seed(a.seed, 1);
    SimStats sa = run_tasep(a, 1000, 20000, 8);
    const SimStats sb = run_tasep(b, 1000, 20000, 8);
    const double combined_time = sa.elapsed + sb.elapsed;
    const double weighted =
        (sa.density(5) * sa.elapsed + sb.density(5) * sb.elapsed) / combined_time;
    sa.merge(sb);
    CHECK(sa.elapsed == doctest::Approx(combined_time).epsilon(1e-15));
    CHECK(sa.num_batches == 16);
    CHECK(sa.density(5) == doctest::Approx(weighted).epsilon(1e-12));
}
