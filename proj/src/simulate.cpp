#include "ltasep/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace ltasep::sim {

std::uint64_t split_seed(std::uint64_t master, std::uint64_t worker) {
    // splitmix64 of master xor golden-ratio stream index
    std::uint64_t z = master ^ (0x9E3779B97F4A7C15ull * (worker + 1));
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

bool LatticeState::valid() const {
    const int n = num_sites;
    const int ell = particle_size;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] < 1 || positions[i] > n) return false;
        if (i > 0 && positions[i] - positions[i - 1] < ell) return false;
    }
    if (geometry == Geometry::Ring && positions.size() > 1) {
        if (positions.front() + n - positions.back() < ell) return false;
    }
    return true;
}

LatticeState ZrpState::to_lattice() const {
    LatticeState st;
    st.num_sites = num_sites;
    st.particle_size = particle_size;
    st.geometry = Geometry::Ring;
    const int m = static_cast<int>(gaps.size());
    std::int64_t k = anchor;
    for (int i = 0; i < m; ++i) {
        st.positions.push_back(static_cast<int>((k - 1) % num_sites + 1));
        k += particle_size + gaps[i]; // next particle: current + ell + holes ahead
    }
    std::sort(st.positions.begin(), st.positions.end());
    return st;
}

ZrpState ZrpState::from_lattice(const LatticeState& state) {
    if (state.geometry != Geometry::Ring)
        throw std::invalid_argument("ZrpState::from_lattice: ring geometry required");
    ZrpState z;
    z.num_sites = state.num_sites;
    z.particle_size = state.particle_size;
    const int m = static_cast<int>(state.positions.size());
    if (m == 0) return z;
    z.anchor = state.positions.front();
    for (int i = 0; i < m; ++i) {
        const int here = state.positions[i];
        const int ahead =
            (i + 1 < m) ? state.positions[i + 1] : state.positions.front() + state.num_sites;
        z.gaps.push_back(ahead - here - state.particle_size);
    }
    return z;
}

bool ZrpState::valid() const {
    if (gaps.empty()) return true; // empty ring, nothing to account
    std::int64_t total = 0;
    for (auto g : gaps) {
        if (g < 0) return false;
        total += g;
    }
    return total == num_sites - static_cast<std::int64_t>(gaps.size()) * particle_size;
}

namespace {

// Fenwick tree over nonnegative event rates with prefix-sum sampling.
class RateTree {
public:
    explicit RateTree(int n) : n_(n), leaf_(n, 0.0), tree_(n + 1, 0.0) {}

    void set(int i, double value) {
        const double delta = value - leaf_[i];
        if (delta == 0.0) return;
        leaf_[i] = value;
        for (int k = i + 1; k <= n_; k += k & -k) tree_[k] += delta;
    }

    double get(int i) const { return leaf_[i]; }

    double total() const {
        double s = 0.0;
        for (int k = n_; k > 0; k -= k & -k) s += tree_[k];
        return s;
    }

    // First index whose cumulative rate exceeds u; clamped to a positive leaf.
    int sample(double u) const {
        int pos = 0;
        int step = 1;
        while ((step << 1) <= n_) step <<= 1;
        for (; step > 0; step >>= 1) {
            const int next = pos + step;
            if (next <= n_ && tree_[next] <= u) {
                u -= tree_[next];
                pos = next;
            }
        }
        if (pos >= n_) pos = n_ - 1;
        while (pos > 0 && leaf_[pos] <= 0.0) --pos;
        return pos;
    }

    // Re-accumulate sums from the leaves; bounds floating-point drift.
    void rebuild() {
        std::fill(tree_.begin(), tree_.end(), 0.0);
        for (int i = 0; i < n_; ++i) {
            const double v = leaf_[i];
            for (int k = i + 1; k <= n_; k += k & -k) tree_[k] += v;
        }
    }

private:
    int n_;
    std::vector<double> leaf_;
    std::vector<double> tree_;
};

constexpr std::uint64_t kRebuildMask = (1ull << 20) - 1;

void init_stats(SimStats& st, const ModelSpec& spec, int num_batches) {
    st.num_sites = spec.num_sites;
    st.geometry = spec.geometry;
    st.seed = spec.seed;
    st.num_batches = num_batches;
    st.occupancy_time.assign(spec.num_sites, 0.0);
    st.hop_counts.assign(st.bonds(), 0);
    st.batch_elapsed.assign(num_batches, 0.0);
    st.batch_occupancy.assign(static_cast<std::size_t>(num_batches) * spec.num_sites, 0.0);
    st.batch_hops.assign(static_cast<std::size_t>(num_batches) * st.bonds(), 0);
}

double batch_ratio_stderr(const std::vector<double>& num, const std::vector<double>& den) {
    const int b = static_cast<int>(num.size());
    if (b < 2) return 0.0;
    std::vector<double> ratio;
    ratio.reserve(b);
    for (int i = 0; i < b; ++i)
        if (den[i] > 0.0) ratio.push_back(num[i] / den[i]);
    const int m = static_cast<int>(ratio.size());
    if (m < 2) return 0.0;
    double mean = 0.0;
    for (double r : ratio) mean += r;
    mean /= m;
    double var = 0.0;
    for (double r : ratio) var += (r - mean) * (r - mean);
    var /= (m - 1);
    return std::sqrt(var / m);
}

} // namespace

// ---------------------------------------------------------------------------
// TASEP simulator

struct Simulator::Impl {
    ModelSpec spec;
    bool open;
    int n, ell;
    double time = 0.0;
    std::uint64_t steps_done = 0;

    RateTree tree;                    // slot 0 = entry (open); slots 1..N per site
    std::vector<int> at;              // site -> particle id, -1 if empty
    std::vector<int> pos, next, prev; // by particle id; next = toward exit
    std::vector<double> arrival;      // by particle id: time of arrival at pos
    std::vector<int> free_ids;
    int head = -1, tail = -1; // leftmost / rightmost particle (open)
    int count = 0;

    // sampling sink; disabled while null
    SimStats* stats = nullptr;
    int batch = 0;

    explicit Impl(const ModelSpec& s)
        : spec(s), open(s.geometry == Geometry::Open), n(s.num_sites), ell(s.particle_size),
          tree(s.num_sites + 1), at(s.num_sites + 1, -1) {}

    int alloc_particle(int site) {
        int id;
        if (!free_ids.empty()) {
            id = free_ids.back();
            free_ids.pop_back();
        } else {
            id = static_cast<int>(pos.size());
            pos.push_back(0);
            next.push_back(-1);
            prev.push_back(-1);
            arrival.push_back(time);
        }
        pos[id] = site;
        arrival[id] = time;
        at[site] = id;
        ++count;
        return id;
    }

    // Sites to the particle ahead; n means a clear run (nothing ahead).
    int gap_ahead(int id) const {
        const int nx = next[id];
        if (nx < 0) return n; // open geometry, nothing ahead
        int g = pos[nx] - pos[id];
        if (g <= 0) g += n; // ring wrap; single particle gives g = n
        return g;
    }

    bool hop_enabled(int id) const { return gap_ahead(id) > ell; }

    double site_slot_rate(int id) const {
        const int s = pos[id];
        if (open && s == n) return spec.beta; // exit clock
        return hop_enabled(id) ? spec.rates.rate(s) : 0.0;
    }

    void refresh_site(int site) {
        const int id = at[site];
        tree.set(site, id < 0 ? 0.0 : site_slot_rate(id));
    }

    void refresh_entry() {
        if (!open) return;
        const bool enabled = head < 0 || pos[head] > ell;
        tree.set(0, enabled ? spec.alpha : 0.0);
    }

    void settle_occupancy(int id) {
        const double dt = time - arrival[id];
        arrival[id] = time;
        if (!stats || dt <= 0.0) return;
        const int site = pos[id];
        stats->occupancy_time[site - 1] += dt;
        stats->batch_occupancy[static_cast<std::size_t>(batch) * n + site - 1] += dt;
    }

    void count_bond(int bond) {
        if (!stats) return;
        const int idx = open ? bond : bond - 1;
        ++stats->hop_counts[idx];
        ++stats->batch_hops[static_cast<std::size_t>(batch) * stats->bonds() + idx];
    }

    // Flush every live particle's pending occupancy up to the current time.
    void flush_occupancy() {
        for (int s = 1; s <= n; ++s)
            if (at[s] >= 0) settle_occupancy(at[s]);
    }

    void insert_initial(const std::vector<int>& positions) {
        int prev_id = -1;
        for (int s : positions) {
            const int id = alloc_particle(s);
            prev[id] = prev_id;
            if (prev_id >= 0) next[prev_id] = id;
            prev_id = id;
        }
        if (!positions.empty()) {
            head = at[positions.front()];
            tail = prev_id;
            if (open) {
                next[tail] = -1;
            } else { // circular linkage
                next[tail] = head;
                prev[head] = tail;
            }
        }
        for (int s : positions) refresh_site(s);
        refresh_entry();
    }

    Event apply(int slot) {
        Event ev;
        if (open && slot == 0) { // entry
            ev.type = Event::Type::Entry;
            ev.site = 1;
            const int id = alloc_particle(1);
            next[id] = head;
            prev[id] = -1;
            if (head >= 0) prev[head] = id;
            head = id;
            if (tail < 0) tail = id;
            if (stats) ++stats->entry_count;
            count_bond(0);
            refresh_site(1);
            refresh_entry();
            return ev;
        }
        const int site = slot;
        const int id = at[site];
        if (open && site == n) { // exit
            ev.type = Event::Type::Exit;
            ev.site = n;
            settle_occupancy(id);
            at[n] = -1;
            const int b = prev[id];
            if (b >= 0) next[b] = -1;
            tail = b;
            if (head == id) head = -1;
            free_ids.push_back(id);
            --count;
            if (stats) ++stats->exit_count;
            count_bond(n);
            tree.set(n, 0.0);
            if (b >= 0) refresh_site(pos[b]);
            refresh_entry();
            return ev;
        }
        // hop
        ev.type = Event::Type::Hop;
        ev.site = site;
        const int dest = (site == n) ? 1 : site + 1; // site == n only on rings
        settle_occupancy(id);
        at[site] = -1;
        at[dest] = id;
        pos[id] = dest;
        count_bond(site);
        tree.set(site, 0.0);
        refresh_site(dest);
        const int b = prev[id];
        if (b >= 0 && b != id) refresh_site(pos[b]);
        refresh_entry();
        return ev;
    }

    Event step(Rng& rng) {
        const double total = tree.total();
        if (total <= 0.0) return {};
        const double wait = -std::log(uniform01(rng)) / total;
        time += wait;
        const int slot = tree.sample(uniform01(rng) * total);
        Event ev = apply(slot);
        ev.wait = wait;
        if ((++steps_done & kRebuildMask) == 0) tree.rebuild();
        return ev;
    }

    // Burn in, then sample with batch-means bookkeeping.
    SimStats run(Rng& rng, std::uint64_t burn_in, std::uint64_t samples, int num_batches) {
        SimStats out;
        init_stats(out, spec, num_batches);
        for (std::uint64_t e = 0; e < burn_in; ++e) {
            if (step(rng).type == Event::Type::None) {
                out.absorbing_reached = true;
                return out;
            }
        }
        // Reset occupancy clocks to the start of the sampling window.
        for (int s = 1; s <= n; ++s)
            if (at[s] >= 0) arrival[at[s]] = time;
        stats = &out;
        batch = 0;
        const double t_start = time;
        double batch_start = time;
        for (std::uint64_t e = 0; e < samples; ++e) {
            const int next_batch = static_cast<int>((e * num_batches) / samples);
            if (next_batch != batch) {
                flush_occupancy();
                out.batch_elapsed[batch] = time - batch_start;
                batch_start = time;
                batch = next_batch;
            }
            if (step(rng).type == Event::Type::None) {
                out.absorbing_reached = true;
                break;
            }
            ++out.event_count;
        }
        flush_occupancy();
        out.batch_elapsed[batch] = time - batch_start;
        out.elapsed = time - t_start;
        stats = nullptr;
        return out;
    }

    LatticeState export_state() const {
        LatticeState st;
        st.num_sites = n;
        st.particle_size = ell;
        st.geometry = spec.geometry;
        st.time = time;
        for (int s = 1; s <= n; ++s)
            if (at[s] >= 0) st.positions.push_back(s);
        return st;
    }
};

Simulator::Simulator(const ModelSpec& spec) : impl_(std::make_unique<Impl>(spec)) {
    std::vector<int> init;
    if (spec.geometry == Geometry::Ring && spec.ring_particles > 0) {
        const int m = spec.ring_particles;
        for (int i = 0; i < m; ++i)
            init.push_back(1 + static_cast<int>((static_cast<long long>(i) * spec.num_sites) / m));
    }
    impl_->insert_initial(init);
}

Simulator::Simulator(const ModelSpec& spec, const LatticeState& initial)
    : impl_(std::make_unique<Impl>(spec)) {
    if (initial.num_sites != spec.num_sites || initial.particle_size != spec.particle_size ||
        initial.geometry != spec.geometry || !initial.valid())
        throw std::invalid_argument("Simulator: initial state invalid for this spec");
    if (spec.geometry == Geometry::Ring &&
        static_cast<int>(initial.positions.size()) != spec.ring_particles)
        throw std::invalid_argument("Simulator: ring particle count mismatch");
    impl_->time = initial.time;
    impl_->insert_initial(initial.positions);
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

Event Simulator::step(Rng& rng) { return impl_->step(rng); }
bool Simulator::absorbing() const { return impl_->tree.total() <= 0.0; }
double Simulator::time() const { return impl_->time; }
int Simulator::particle_count() const { return impl_->count; }
LatticeState Simulator::state() const { return impl_->export_state(); }
SimStats Simulator::run(Rng& rng, std::uint64_t burn_in_events, std::uint64_t sample_events,
                        int num_batches) {
    if (sample_events == 0) throw std::invalid_argument("Simulator::run: sample_events must be > 0");
    if (num_batches < 1) num_batches = 1;
    return impl_->run(rng, burn_in_events, sample_events, num_batches);
}

// ---------------------------------------------------------------------------
// ZRP simulator (ring only). ZRP site i <-> TASEP particle i; firing moves a
// hole backwards, i.e. TASEP particle i one site forward at rate p at its
// current lattice position. Statistics are recorded in TASEP coordinates.

namespace {

class ZrpSimulator {
public:
    ZrpSimulator(const ModelSpec& spec, const ZrpState& init)
        : spec_(spec), n_(spec.num_sites), m_(static_cast<int>(init.gaps.size())),
          gaps_(init.gaps), pos_(m_), arrival_(m_, 0.0), tree_(std::max(m_, 1)) {
        if (!init.valid()) throw std::invalid_argument("ZrpSimulator: invalid gap state");
        std::int64_t k = init.anchor;
        for (int i = 0; i < m_; ++i) {
            pos_[i] = static_cast<int>((k - 1) % n_ + 1);
            k += spec.particle_size + gaps_[i];
        }
        for (int i = 0; i < m_; ++i) refresh(i);
    }

    bool absorbing() const { return tree_.total() <= 0.0; }
    double time() const { return time_; }

    Event step(Rng& rng) {
        const double total = tree_.total();
        if (total <= 0.0) return {};
        const double wait = -std::log(uniform01(rng)) / total;
        time_ += wait;
        const int i = tree_.sample(uniform01(rng) * total);
        apply(i);
        Event ev;
        ev.type = Event::Type::ZrpMove;
        ev.site = i + 1;
        ev.wait = wait;
        if ((++steps_done_ & kRebuildMask) == 0) tree_.rebuild();
        return ev;
    }

    SimStats run(Rng& rng, std::uint64_t burn_in, std::uint64_t samples, int num_batches) {
        SimStats out;
        init_stats(out, spec_, num_batches);
        for (std::uint64_t e = 0; e < burn_in; ++e) {
            if (step(rng).type == Event::Type::None) {
                out.absorbing_reached = true;
                return out;
            }
        }
        std::fill(arrival_.begin(), arrival_.end(), time_);
        stats_ = &out;
        batch_ = 0;
        const double t_start = time_;
        double batch_start = time_;
        for (std::uint64_t e = 0; e < samples; ++e) {
            const int next_batch = static_cast<int>((e * num_batches) / samples);
            if (next_batch != batch_) {
                flush();
                out.batch_elapsed[batch_] = time_ - batch_start;
                batch_start = time_;
                batch_ = next_batch;
            }
            if (step(rng).type == Event::Type::None) {
                out.absorbing_reached = true;
                break;
            }
            ++out.event_count;
        }
        flush();
        out.batch_elapsed[batch_] = time_ - batch_start;
        out.elapsed = time_ - t_start;
        stats_ = nullptr;
        return out;
    }

private:
    void refresh(int i) {
        tree_.set(i, gaps_[i] > 0 ? spec_.rates.rate(pos_[i]) : 0.0);
    }

    void settle(int i) {
        const double dt = time_ - arrival_[i];
        arrival_[i] = time_;
        if (!stats_ || dt <= 0.0) return;
        stats_->occupancy_time[pos_[i] - 1] += dt;
        stats_->batch_occupancy[static_cast<std::size_t>(batch_) * n_ + pos_[i] - 1] += dt;
    }

    void flush() {
        for (int i = 0; i < m_; ++i) settle(i);
    }

    void apply(int i) {
        // TASEP particle i+1 hops forward: gap ahead shrinks, gap behind grows.
        settle(i);
        if (stats_) {
            const int bond = pos_[i] - 1;
            ++stats_->hop_counts[bond];
            ++stats_->batch_hops[static_cast<std::size_t>(batch_) * stats_->bonds() + bond];
        }
        pos_[i] = pos_[i] % n_ + 1;
        --gaps_[i];
        const int behind = (i == 0) ? m_ - 1 : i - 1;
        ++gaps_[behind];
        refresh(i);
        refresh(behind);
    }

    ModelSpec spec_;
    int n_, m_;
    std::vector<std::int64_t> gaps_;
    std::vector<int> pos_;
    std::vector<double> arrival_;
    RateTree tree_;
    double time_ = 0.0;
    std::uint64_t steps_done_ = 0;
    SimStats* stats_ = nullptr;
    int batch_ = 0;
};

} // namespace

// ---------------------------------------------------------------------------
// Statistics accessors

double SimStats::density(int site) const {
    return elapsed > 0.0 ? occupancy_time[site - 1] / elapsed : 0.0;
}

double SimStats::density_stderr(int site) const {
    std::vector<double> num(num_batches), den(num_batches);
    for (int b = 0; b < num_batches; ++b) {
        num[b] = batch_occupancy[static_cast<std::size_t>(b) * num_sites + site - 1];
        den[b] = batch_elapsed[b];
    }
    return batch_ratio_stderr(num, den);
}

double SimStats::bond_current(int bond) const {
    const int idx = geometry == Geometry::Open ? bond : bond - 1;
    return elapsed > 0.0 ? static_cast<double>(hop_counts[idx]) / elapsed : 0.0;
}

double SimStats::bond_current_stderr(int bond) const {
    const int idx = geometry == Geometry::Open ? bond : bond - 1;
    std::vector<double> num(num_batches), den(num_batches);
    for (int b = 0; b < num_batches; ++b) {
        num[b] = static_cast<double>(batch_hops[static_cast<std::size_t>(b) * bonds() + idx]);
        den[b] = batch_elapsed[b];
    }
    return batch_ratio_stderr(num, den);
}

void SimStats::merge(const SimStats& other) {
    if (other.num_sites != num_sites || other.geometry != geometry)
        throw std::invalid_argument("SimStats::merge: incompatible runs");
    event_count += other.event_count;
    entry_count += other.entry_count;
    exit_count += other.exit_count;
    absorbing_reached = absorbing_reached || other.absorbing_reached;
    elapsed += other.elapsed;
    for (int i = 0; i < num_sites; ++i) occupancy_time[i] += other.occupancy_time[i];
    for (int i = 0; i < bonds(); ++i) hop_counts[i] += other.hop_counts[i];
    num_batches += other.num_batches;
    batch_elapsed.insert(batch_elapsed.end(), other.batch_elapsed.begin(),
                         other.batch_elapsed.end());
    batch_occupancy.insert(batch_occupancy.end(), other.batch_occupancy.begin(),
                           other.batch_occupancy.end());
    batch_hops.insert(batch_hops.end(), other.batch_hops.begin(), other.batch_hops.end());
}

void SimStats::to_csv(std::ostream& os) const {
    os << "site,density,density_stderr,bond_current\n" << std::setprecision(17);
    for (int s = 1; s <= num_sites; ++s)
        os << s << ',' << density(s) << ',' << density_stderr(s) << ',' << bond_current(s) << '\n';
}

nlohmann::json SimStats::metadata() const {
    return nlohmann::json{{"num_sites", num_sites},
                          {"geometry", to_string(geometry)},
                          {"seed", seed},
                          {"event_count", event_count},
                          {"entry_count", entry_count},
                          {"exit_count", exit_count},
                          {"elapsed_time", elapsed},
                          {"num_batches", num_batches},
                          {"absorbing_reached", absorbing_reached}};
}

// ---------------------------------------------------------------------------
// Drivers

SimStats run_tasep(const ModelSpec& spec, std::uint64_t burn_in_events,
                   std::uint64_t sample_events, int num_batches) {
    Simulator simulator(spec);
    Rng rng(spec.seed);
    return simulator.run(rng, burn_in_events, sample_events, num_batches);
}

SimStats run_zrp(const ModelSpec& spec, std::uint64_t burn_in_events,
                 std::uint64_t sample_events, int num_batches) {
    if (spec.geometry != Geometry::Ring)
        throw std::invalid_argument("run_zrp: ring geometry required");
    if (sample_events == 0) throw std::invalid_argument("run_zrp: sample_events must be > 0");
    if (num_batches < 1) num_batches = 1;
    // Initial state: evenly spaced particles, same as the TASEP default.
    Simulator seed_state(spec);
    const ZrpState init = ZrpState::from_lattice(seed_state.state());
    ZrpSimulator zrp(spec, init);
    Rng rng(spec.seed);
    return zrp.run(rng, burn_in_events, sample_events, num_batches);
}

Event next_event(LatticeState& state, const ModelSpec& spec, Rng& rng) {
    Simulator simulator(spec, state);
    const Event ev = simulator.step(rng);
    state = simulator.state();
    return ev;
}

} // namespace ltasep::sim
