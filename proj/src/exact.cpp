#include "ltasep/exact.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace ltasep::exact {

namespace {

bool occupied(std::uint64_t s, int site) { return (s >> (site - 1)) & 1u; }

// True when the particle whose reference point sits at `site` can hop: no
// reference point within the next ell sites (cyclic for rings; for open
// lattices sites beyond N never obstruct).
bool hop_free(std::uint64_t s, int site, int n, int ell, Geometry g) {
    for (int d = 1; d <= ell; ++d) {
        int k = site + d;
        if (k > n) {
            if (g == Geometry::Open) break;
            k -= n;
        }
        if (occupied(s, k)) return false;
    }
    return true;
}

bool entry_enabled(std::uint64_t s, int ell) {
    const std::uint64_t mask = (ell >= 64) ? ~0ull : ((1ull << ell) - 1ull);
    return (s & mask) == 0;
}

void enumerate_open(int n, int ell, int next_site, std::uint64_t acc,
                    std::vector<std::uint64_t>& out, std::size_t max_states) {
    out.push_back(acc);
    if (out.size() > max_states) throw std::runtime_error("StateSpace: too many states");
    for (int k = next_site; k <= n; ++k)
        enumerate_open(n, ell, k + ell, acc | (1ull << (k - 1)), out, max_states);
}

void enumerate_ring(int n, int ell, int m, int next_site, int limit, std::uint64_t acc,
                    int placed, std::vector<std::uint64_t>& out, std::size_t max_states) {
    if (placed == m) {
        out.push_back(acc);
        if (out.size() > max_states) throw std::runtime_error("StateSpace: too many states");
        return;
    }
    for (int k = next_site; k <= limit; ++k)
        enumerate_ring(n, ell, m, k + ell, limit, acc | (1ull << (k - 1)), placed + 1, out,
                       max_states);
}

} // namespace

StateSpace StateSpace::enumerate(int num_sites, int particle_size, Geometry geometry,
                                 int ring_particles, std::size_t max_states) {
    if (num_sites < 1 || num_sites > 60)
        throw std::invalid_argument("StateSpace: need 1 <= N <= 60");
    StateSpace space;
    space.num_sites = num_sites;
    space.particle_size = particle_size;
    space.geometry = geometry;
    space.ring_particles = ring_particles;
    if (geometry == Geometry::Open) {
        enumerate_open(num_sites, particle_size, 1, 0ull, space.states, max_states);
    } else {
        if (ring_particles < 0)
            throw std::invalid_argument("StateSpace: ring enumeration needs a particle count");
        if (ring_particles == 0) {
            space.states.push_back(0ull);
        } else {
            // Fix particle 1's position to iterate once per rotation class is
            // not valid here (rates are inhomogeneous), so enumerate all
            // placements: first particle at site k1, remaining ones at least
            // ell apart and, cyclically, at least ell before k1 + N.
            // Anchor at the smallest occupied site k1; the remaining M-1
            // particles sit in [k1+ell, k1+N-ell] so the wraparound gap back
            // to k1 is also >= ell. Each state is produced exactly once.
            for (int k1 = 1; k1 <= num_sites; ++k1) {
                std::vector<std::uint64_t> tails;
                enumerate_ring(num_sites, particle_size, ring_particles - 1, k1 + particle_size,
                               std::min(num_sites, k1 + num_sites - particle_size), 0ull, 0, tails,
                               max_states);
                for (std::uint64_t t : tails) {
                    if (space.states.size() >= max_states)
                        throw std::runtime_error("StateSpace: too many states");
                    space.states.push_back(t | (1ull << (k1 - 1)));
                }
            }
        }
    }
    space.index.reserve(space.states.size() * 2);
    for (std::size_t i = 0; i < space.states.size(); ++i)
        space.index.emplace(space.states[i], static_cast<int>(i));
    return space;
}

namespace {

// Enumerate outgoing transitions of `s`, calling visit(target_state, rate).
template <typename Visit>
void for_each_transition(std::uint64_t s, const ModelSpec& spec, Visit&& visit) {
    const int n = spec.num_sites;
    const int ell = spec.particle_size;
    if (spec.geometry == Geometry::Open && entry_enabled(s, ell))
        visit(s | 1ull, spec.alpha);
    for (int k = 1; k <= n; ++k) {
        if (!occupied(s, k)) continue;
        if (spec.geometry == Geometry::Open) {
            if (k == n) {
                visit(s & ~(1ull << (n - 1)), spec.beta);
            } else if (hop_free(s, k, n, ell, Geometry::Open)) {
                visit((s & ~(1ull << (k - 1))) | (1ull << k), spec.rates.rate(k));
            }
        } else {
            if (hop_free(s, k, n, ell, Geometry::Ring)) {
                const int dest = (k == n) ? 1 : k + 1;
                visit((s & ~(1ull << (k - 1))) | (1ull << (dest - 1)), spec.rates.rate(k));
            }
        }
    }
}

} // namespace

StationaryDistribution stationary_distribution(const ModelSpec& spec, const StateSpace& space) {
    const int n = space.size();
    if (spec.geometry == Geometry::Ring &&
        static_cast<long long>(spec.ring_particles) * spec.particle_size == spec.num_sites &&
        spec.ring_particles > 0)
        throw std::invalid_argument("stationary_distribution: fully packed ring is frozen "
                                    "(reducible chain)");

    // pi Q = 0 with sum(pi) = 1, i.e. A x = e0 where A = Q^T with its first
    // row replaced by ones.
    constexpr int kDenseLimit = 4096;
    std::vector<double> pi(n, 0.0);
    if (n <= kDenseLimit) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            double out_rate = 0.0;
            for_each_transition(space.states[i], spec, [&](std::uint64_t t, double rate) {
                const int j = space.index.at(t);
                A(j, i) += rate;
                out_rate += rate;
            });
            A(i, i) -= out_rate;
        }
        A.row(0).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        b(0) = 1.0;
        const Eigen::VectorXd x = A.partialPivLu().solve(b);
        for (int i = 0; i < n; ++i) pi[i] = x(i);
    } else {
        // Power iteration on the uniformized chain P = I + Q/Lambda.
        using Trip = Eigen::Triplet<double>;
        std::vector<Trip> trips;
        double max_out = 0.0;
        std::vector<double> out_rates(n, 0.0);
        for (int i = 0; i < n; ++i) {
            for_each_transition(space.states[i], spec, [&](std::uint64_t t, double rate) {
                trips.emplace_back(space.index.at(t), i, rate);
                out_rates[i] += rate;
            });
            max_out = std::max(max_out, out_rates[i]);
        }
        const double uniform = 1.05 * max_out;
        Eigen::SparseMatrix<double> QT(n, n);
        for (int i = 0; i < n; ++i) trips.emplace_back(i, i, -out_rates[i]);
        QT.setFromTriplets(trips.begin(), trips.end());
        Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
        for (long it = 0; it < 2000000; ++it) {
            Eigen::VectorXd w = v + (QT * v) / uniform;
            w /= w.sum();
            const double delta = (w - v).cwiseAbs().maxCoeff();
            v = std::move(w);
            if (delta < 1e-15 && it % 16 == 0) {
                if ((QT * v).cwiseAbs().maxCoeff() < 1e-12) break;
            }
        }
        for (int i = 0; i < n; ++i) pi[i] = v(i);
    }

    // Residual ||pi Q||_inf, accumulated column-wise.
    std::vector<double> residual(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double out_rate = 0.0;
        for_each_transition(space.states[i], spec, [&](std::uint64_t t, double rate) {
            residual[space.index.at(t)] += pi[i] * rate;
            out_rate += rate;
        });
        residual[i] -= pi[i] * out_rate;
    }
    double res = 0.0;
    for (double r : residual) res = std::max(res, std::abs(r));
    for (double& p : pi)
        if (p < 0 && p > -1e-13) p = 0.0;
    return {std::move(pi), res};
}

StationaryDistribution stationary_distribution(const ModelSpec& spec) {
    const StateSpace space = StateSpace::enumerate(spec.num_sites, spec.particle_size,
                                                   spec.geometry, spec.ring_particles);
    return stationary_distribution(spec, space);
}

std::vector<double> site_densities(const std::vector<double>& pi, const StateSpace& space) {
    std::vector<double> dens(space.num_sites, 0.0);
    for (std::size_t i = 0; i < space.states.size(); ++i)
        for (int k = 1; k <= space.num_sites; ++k)
            if (occupied(space.states[i], k)) dens[k - 1] += pi[i];
    return dens;
}

std::vector<double> bond_currents(const std::vector<double>& pi, const StateSpace& space,
                                  const ModelSpec& spec) {
    const int n = spec.num_sites;
    const bool open = spec.geometry == Geometry::Open;
    std::vector<double> currents(open ? n + 1 : n, 0.0);
    for (std::size_t i = 0; i < space.states.size(); ++i) {
        const std::uint64_t s = space.states[i];
        if (open && entry_enabled(s, spec.particle_size)) currents[0] += spec.alpha * pi[i];
        for (int k = 1; k <= n; ++k) {
            if (!occupied(s, k)) continue;
            if (open && k == n) {
                currents[n] += spec.beta * pi[i];
            } else if (hop_free(s, k, n, spec.particle_size, spec.geometry)) {
                currents[open ? k : k - 1] += spec.rates.rate(k) * pi[i];
            }
        }
    }
    return currents;
}

void write_density_csv(std::ostream& os, const std::vector<double>& pi, const StateSpace& space,
                       const ModelSpec& spec) {
    const auto dens = site_densities(pi, space);
    const auto currents = bond_currents(pi, space, spec);
    const bool open = spec.geometry == Geometry::Open;
    os << "site,density,density_stderr,bond_current\n" << std::setprecision(17);
    for (int s = 1; s <= spec.num_sites; ++s)
        os << s << ',' << dens[s - 1] << ",0," << currents[open ? s : s - 1] << '\n';
}

double stationary_current(const std::vector<double>& pi, const StateSpace& space,
                          const ModelSpec& spec) {
    const std::vector<double> currents = bond_currents(pi, space, spec);
    if (spec.geometry == Geometry::Open) {
        const double entry = currents.front();
        const double exit = currents.back();
        if (std::abs(entry - exit) > 1e-10)
            throw std::runtime_error("stationary_current: entry/exit currents disagree beyond 1e-10");
        return 0.5 * (entry + exit);
    }
    double lo = currents[0], hi = currents[0];
    for (double c : currents) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (hi - lo > 1e-10)
        throw std::runtime_error("stationary_current: ring bond currents disagree beyond 1e-10");
    return 0.5 * (lo + hi);
}

} // namespace ltasep::exact
