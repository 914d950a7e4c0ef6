#ifndef LTASEP_EXACT_HPP
#define LTASEP_EXACT_HPP

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "ltasep/model.hpp"

namespace ltasep::exact {

// Full enumeration of the configuration space for small lattices. States are
// occupancy bitmasks of reference points (bit k-1 <-> site k occupied), all
// satisfying the minimum spacing ell between consecutive reference points
// (cyclically for rings). Requires N <= 60.
struct StateSpace {
    int num_sites = 0;
    int particle_size = 1;
    Geometry geometry = Geometry::Open;
    int ring_particles = -1; // fixed particle count for rings
    std::vector<std::uint64_t> states;
    std::unordered_map<std::uint64_t, int> index;

    static StateSpace enumerate(int num_sites, int particle_size, Geometry geometry,
                                int ring_particles = -1, std::size_t max_states = 1000000);

    int size() const { return static_cast<int>(states.size()); }
};

struct StationaryDistribution {
    std::vector<double> pi;
    double residual;       // max |pi Q|
};

/// Unique stationary distribution of the generator implied by the spec's
/// rates. Open chains are irreducible for alpha, beta > 0; a fully packed
/// ring (M*ell == N) is frozen and rejected.
StationaryDistribution stationary_distribution(const ModelSpec& spec, const StateSpace& space);
StationaryDistribution stationary_distribution(const ModelSpec& spec);

/// Per-site occupation probabilities sum_s pi(s) tau_k(s).
std::vector<double> site_densities(const std::vector<double>& pi, const StateSpace& space);

/// Stationary current. Open geometry: computed both as alpha P(entry enabled)
/// and beta P(tau_N = 1); throws if the two disagree beyond 1e-10. Ring:
/// computed across every bond, which must all agree to 1e-10.
double stationary_current(const std::vector<double>& pi, const StateSpace& space,
                          const ModelSpec& spec);

/// Per-bond stationary currents (bond k carries hops out of site k; for open
/// geometry index 0 is the entry bond and index N the exit bond).
std::vector<double> bond_currents(const std::vector<double>& pi, const StateSpace& space,
                                  const ModelSpec& spec);

/// Densities in the SimStats CSV schema (site,density,density_stderr,
/// bond_current) with zero standard errors, for diff-based comparison.
void write_density_csv(std::ostream& os, const std::vector<double>& pi, const StateSpace& space,
                       const ModelSpec& spec);

} // namespace ltasep::exact

#endif
