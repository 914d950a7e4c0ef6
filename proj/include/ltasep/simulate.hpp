#ifndef LTASEP_SIMULATE_HPP
#define LTASEP_SIMULATE_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <vector>

#include "json.hpp"
#include "ltasep/model.hpp"

namespace ltasep::sim {

using Rng = std::mt19937_64;

/// Uniform double in (0, 1]; safe as a log argument.
inline double uniform01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Deterministic per-worker seed derivation (splitmix64 of master ^ index).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t worker);

// Snapshot of particle reference-point positions.
struct LatticeState {
    std::vector<int> positions; // strictly increasing sites in 1..N
    double time = 0.0;
    int num_sites = 0;
    int particle_size = 1;
    Geometry geometry = Geometry::Open;

    /// Gap invariant: positions strictly increasing, consecutive reference
    /// points >= ell apart (cyclically for rings), all inside 1..N.
    bool valid() const;
};

// Gap representation of a ring state: gaps[i] holes ahead of particle i+1,
// anchor the site of particle 1. sum(gaps) = N - M*ell.
struct ZrpState {
    std::vector<std::int64_t> gaps;
    int anchor = 1;
    int num_sites = 0;
    int particle_size = 1;

    LatticeState to_lattice() const;
    static ZrpState from_lattice(const LatticeState& state);
    bool valid() const;
};

struct Event {
    enum class Type { None, Entry, Hop, Exit, ZrpMove };
    Type type = Type::None;
    int site = 0;      // hop origin site (TASEP) or firing ZRP site index
    double wait = 0.0; // exponential holding time before the event
};

// Time-averaged occupancy and bond-hop statistics, collected after burn-in.
// Batch-means over equal event count windows provide standard errors.
struct SimStats {
    int num_sites = 0;
    Geometry geometry = Geometry::Open;
    std::uint64_t seed = 0;
    std::uint64_t event_count = 0;
    std::uint64_t entry_count = 0;
    std::uint64_t exit_count = 0;
    bool absorbing_reached = false;
    double elapsed = 0.0;                    // simulated time in the sampling window
    std::vector<double> occupancy_time;      // per site, N entries
    std::vector<std::uint64_t> hop_counts;   // open: [0]=entry, [k]=out of site k, [N]=exit
                                             // ring: [k-1]=out of site k
    int num_batches = 0;
    std::vector<double> batch_elapsed;
    std::vector<double> batch_occupancy;     // [b * N + site-1]
    std::vector<std::uint64_t> batch_hops;   // [b * bonds() + bond]

    int bonds() const { return geometry == Geometry::Open ? num_sites + 1 : num_sites; }

    double density(int site) const;          // 1-based
    double density_stderr(int site) const;
    double bond_current(int bond) const;     // open: 0..N as above; ring: 1..N -> bond-1
    double bond_current_stderr(int bond) const;

    /// Combine independent replicas (same lattice); batches are concatenated.
    void merge(const SimStats& other);

    void to_csv(std::ostream& os) const;     // site,density,density_stderr,bond_current
    nlohmann::json metadata() const;
};

// Event-driven continuous-time simulator of the open or ring ell-TASEP.
// Each enabled move carries an exponential clock; events are selected from a
// Fenwick tree over per-site rates in O(log N).
class Simulator {
public:
    explicit Simulator(const ModelSpec& spec);
    Simulator(const ModelSpec& spec, const LatticeState& initial);
    ~Simulator();
    Simulator(Simulator&&) noexcept;
    Simulator& operator=(Simulator&&) noexcept;

    Event step(Rng& rng);
    bool absorbing() const;
    double time() const;
    int particle_count() const;
    LatticeState state() const;

    /// Burn in for burn_in_events, then collect statistics over sample_events.
    SimStats run(Rng& rng, std::uint64_t burn_in_events, std::uint64_t sample_events,
                 int num_batches = 32);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Run the TASEP (open or ring) for burn_in_events, then collect SimStats
/// over sample_events more events. Identical seeds give identical stats.
SimStats run_tasep(const ModelSpec& spec, std::uint64_t burn_in_events,
                   std::uint64_t sample_events, int num_batches = 32);

/// Run the mapped zero range process on a ring spec and return statistics
/// mapped back to TASEP site occupancies.
SimStats run_zrp(const ModelSpec& spec, std::uint64_t burn_in_events,
                 std::uint64_t sample_events, int num_batches = 32);

/// Single-step API: sample the next event for `state`, apply it, return it.
/// Returns Type::None without advancing time if no event is enabled.
Event next_event(LatticeState& state, const ModelSpec& spec, Rng& rng);

} // namespace ltasep::sim

#endif
