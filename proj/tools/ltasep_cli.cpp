// Command-line driver: simulate | theory | pde | compare | infer | phase-scan,
// configured by a single JSON document. All tabular outputs are CSV with a
// fixed header; run metadata lands in JSON sidecars.

#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ltasep/characteristics.hpp"
#include "ltasep/exact.hpp"
#include "ltasep/hydro.hpp"
#include "ltasep/infer.hpp"
#include "ltasep/model.hpp"
#include "ltasep/pde.hpp"
#include "ltasep/rate_profile.hpp"
#include "ltasep/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ltasep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Rates {
    RateField field;
    std::optional<RateProfile> profile; // sampled lazily when a lattice needs it
};

Rates parse_rates(const json& j, int num_sites, const fs::path& base_dir) {
    const std::string kind = j.value("kind", "constant");
    const Interp interp = interp_from_string(j.value("interpolation", "linear"));
    if (kind == "constant") {
        return {constant_rate(j.value("value", 1.0)), std::nullopt};
    } else if (kind == "linear") {
        return {linear_rate(j.at("slope").get<double>()), std::nullopt};
    } else if (kind == "bump") {
        return {bump_rate(j.value("center", 0.5), j.value("width", 0.2),
                          j.value("depth", 0.5)),
                std::nullopt};
    } else if (kind == "two-bump") {
        return {two_bump_rate(j.value("center1", 0.3), j.value("center2", 0.7),
                              j.value("width", 0.08), j.value("depth", 0.5)),
                std::nullopt};
    } else if (kind == "array") {
        RateProfile p(j.at("values").get<std::vector<double>>(), interp);
        return {p.field(), std::move(p)};
    } else if (kind == "csv") {
        std::ifstream in(base_dir / j.at("path").get<std::string>());
        if (!in) throw ConfigError("cannot open rates csv: " + j.at("path").get<std::string>());
        RateProfile p = RateProfile::from_csv(in, interp);
        return {p.field(), std::move(p)};
    }
    (void)num_sites;
    throw ConfigError("unknown rates kind: " + kind);
}

struct Setup {
    json config;
    fs::path out_dir;
    fs::path base_dir;
    std::uint64_t seed = 0;
    int workers = 1;
};

ModelSpec build_model(const Setup& s, Rates& rates) {
    const json& jm = s.config.at("model");
    const int n = jm.at("N").get<int>();
    const int ell = jm.value("ell", 1);
    const Geometry geom = geometry_from_string(jm.value("geometry", "open"));
    RateProfile profile = rates.profile
                              ? *rates.profile
                              : RateProfile::sample(rates.field, n);
    if (profile.sites() != n)
        throw ConfigError("rate profile size does not match model.N");
    return ModelSpec(n, ell, jm.value("alpha", 0.0), jm.value("beta", 0.0),
                     std::move(profile), geom, jm.value("particles", 0), s.seed);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------

sim::SimStats run_simulation(const Setup& s, const ModelSpec& spec) {
    const json js = s.config.value("simulate", json::object());
    const auto burn_in = js.value("burn_in_events", std::uint64_t{100000});
    const auto samples = js.value("sample_events", std::uint64_t{1000000});
    const int batches = js.value("batches", 32);
    const int replicas = js.value("replicas", 1);
    const std::string variant = js.value("variant", "tasep");
    if (variant != "tasep" && variant != "zrp") throw ConfigError("unknown simulate.variant");

    auto one = [&](int r) {
        ModelSpec rspec = spec;
        rspec.seed = replicas == 1 ? spec.seed : sim::split_seed(spec.seed, r);
        return variant == "zrp" ? sim::run_zrp(rspec, burn_in, samples, batches)
                                : sim::run_tasep(rspec, burn_in, samples, batches);
    };
    if (replicas == 1) return one(0);

    std::vector<std::future<sim::SimStats>> futs;
    for (int r = 0; r < replicas; ++r)
        futs.push_back(std::async(s.workers > 1 ? std::launch::async : std::launch::deferred,
                                  one, r));
    sim::SimStats total = futs[0].get();
    for (int r = 1; r < replicas; ++r) total.merge(futs[r].get());
    return total;
}

int mode_simulate(const Setup& s, const ModelSpec& spec) {
    const sim::SimStats stats = run_simulation(s, spec);
    std::ostringstream csv;
    stats.to_csv(csv);
    write_text(s.out_dir / "stats.csv", csv.str());
    json meta = stats.metadata();
    meta["model"] = spec.to_json();
    meta["config"] = s.config;
    write_json(s.out_dir / "run.json", meta);
    return kExitOk;
}

int mode_theory(const Setup& s, const ModelSpec& spec, const Rates& rates) {
    const hydro::PhaseReport report = hydro::classify(spec.alpha, spec.beta, rates.field,
                                                      spec.particle_size);
    const int grid = s.config.value("theory", json::object()).value("grid", 1001);
    const hydro::StationaryProfile prof = hydro::stationary_profile(report, rates.field, grid);
    write_json(s.out_dir / "phase.json", report.to_json());
    std::ostringstream csv;
    prof.to_csv(csv);
    write_text(s.out_dir / "profile.csv", csv.str());
    return kExitOk;
}

int mode_pde(const Setup& s, const ModelSpec& spec, const Rates& rates) {
    const hydro::PhaseReport report = hydro::classify(spec.alpha, spec.beta, rates.field,
                                                      spec.particle_size);
    const json jp = s.config.value("pde", json::object());
    pde::Options opt;
    opt.cells = jp.value("cells", 1000);
    opt.tol = jp.value("tol", 1e-12);
    opt.max_steps = jp.value("max_steps", long{5000000});
    opt.viscous = jp.value("viscous", false);
    opt.lattice_spacing = jp.value("lattice_spacing", 0.0);
    const pde::Result res = pde::solve_steady(report, rates.field, opt);
    std::ostringstream csv;
    res.profile.to_csv(csv);
    write_text(s.out_dir / "pde_profile.csv", csv.str());
    write_json(s.out_dir / "pde.json",
               json{{"converged", res.converged},
                    {"steps", res.steps},
                    {"last_delta", res.last_delta},
                    {"flux_spread", res.flux_spread},
                    {"current", res.current},
                    {"phase", hydro::to_string(report.phase)}});
    if (!res.converged) {
        std::cerr << "pde: no steady state within " << opt.max_steps
                  << " steps (last delta " << res.last_delta << ")\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int mode_compare(const Setup& s, const ModelSpec& spec, const Rates& rates) {
    const sim::SimStats stats = run_simulation(s, spec);
    {
        std::ostringstream raw;
        stats.to_csv(raw);
        write_text(s.out_dir / "stats.csv", raw.str());
    }
    const hydro::PhaseReport report = hydro::classify(spec.alpha, spec.beta, rates.field,
                                                      spec.particle_size);
    const hydro::StationaryProfile prof =
        hydro::stationary_profile(report, rates.field, spec.num_sites + 1);

    const int n = spec.num_sites;
    std::ostringstream csv;
    csv << "site,x,density_sim,density_stderr,rho_theory,abs_err\n" << std::setprecision(17);
    double mae_all = 0.0, mae_bulk = 0.0;
    int bulk_count = 0;
    const int lo = static_cast<int>(std::ceil(0.05 * n)), hi = n - lo;
    for (int k = 1; k <= n; ++k) {
        const double x = static_cast<double>(k) / n;
        const double sim_d = stats.density(k);
        const double theory = prof.interpolate(x);
        const double err = std::abs(sim_d - theory);
        csv << k << ',' << x << ',' << sim_d << ',' << stats.density_stderr(k) << ','
            << theory << ',' << err << '\n';
        mae_all += err;
        if (k > lo && k <= hi) {
            mae_bulk += err;
            ++bulk_count;
        }
    }
    mae_all /= n;
    mae_bulk /= std::max(bulk_count, 1);
    write_text(s.out_dir / "compare.csv", csv.str());
    write_json(s.out_dir / "compare.json",
               json{{"mae_all", mae_all},
                    {"mae_bulk_middle90", mae_bulk},
                    {"phase", hydro::to_string(report.phase)},
                    {"J_theory", report.current},
                    {"J_sim_exit", stats.geometry == Geometry::Open
                                       ? stats.bond_current(spec.num_sites)
                                       : stats.bond_current(1)},
                    {"events", stats.event_count}});
    std::cout << "compare: phase " << hydro::to_string(report.phase) << ", bulk MAE "
              << mae_bulk << "\n";
    return kExitOk;
}

int mode_infer(const Setup& s) {
    const json ji = s.config.at("infer");
    const fs::path path = s.base_dir / ji.at("profile_csv").get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile csv: " + path.string());
    const infer::DensityProfile profile = infer::DensityProfile::from_csv(in);
    infer::InferOptions opt;
    opt.anchor_x = ji.value("anchor_x", 0.5);
    opt.smooth_window = ji.value("smooth_window", 0);
    const infer::Result res = infer::infer_rates(profile, ji.value("ell", 1), opt);
    std::ostringstream csv;
    res.to_csv(csv);
    write_text(s.out_dir / "infer.csv", csv.str());
    write_json(s.out_dir / "infer.json", res.to_json());
    return kExitOk;
}

int mode_phase_scan(const Setup& s, const Rates& rates) {
    const json jp = s.config.at("phase_scan");
    const int ell = s.config.at("model").value("ell", 1);
    auto linspace = [](double lo, double hi, int k) {
        std::vector<double> v(k);
        for (int i = 0; i < k; ++i) v[i] = k == 1 ? lo : lo + (hi - lo) * i / (k - 1);
        return v;
    };
    const auto alphas = linspace(jp.at("alpha_min").get<double>(), jp.at("alpha_max").get<double>(),
                                 jp.value("alpha_steps", 50));
    const auto betas = linspace(jp.at("beta_min").get<double>(), jp.at("beta_max").get<double>(),
                                jp.value("beta_steps", 50));

    // Fan alpha rows across workers; rows are reassembled in order.
    std::vector<std::future<std::vector<hydro::PhaseScanPoint>>> rows;
    for (double a : alphas)
        rows.push_back(std::async(s.workers > 1 ? std::launch::async : std::launch::deferred,
                                  [&, a] { return hydro::phase_scan(rates.field, ell, {a}, betas); }));
    std::ostringstream csv;
    csv << "alpha,beta,phase\n" << std::setprecision(17);
    for (auto& fut : rows)
        for (const auto& p : fut.get())
            csv << p.alpha << ',' << p.beta << ',' << hydro::to_string(p.phase) << '\n';
    write_text(s.out_dir / "scan.csv", csv.str());

    const double a_star = hydro::critical_entry_rate(rates.field.lambda0(),
                                                     rates.field.lambda_min(), ell);
    const double b_star = hydro::critical_exit_rate(rates.field.lambda1(),
                                                    rates.field.lambda_min(), ell);
    write_json(s.out_dir / "scan.json", json{{"alpha_star", a_star}, {"beta_star", b_star}});
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"inhomogeneous l-TASEP toolkit"};
    std::string config_path;
    std::string out_override;
    std::uint64_t seed_override = 0;
    bool have_seed = false;
    int workers = 1;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });
    app.add_option("--workers", workers, "worker threads for scans/replicas");
    app.add_option("--out", out_override, "override the output directory");
    CLI11_PARSE(app, argc, argv);

    Setup s;
    try {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config: " + config_path);
        in >> s.config;
        s.base_dir = fs::path(config_path).parent_path();
        s.seed = have_seed ? seed_override : s.config.value("seed", std::uint64_t{0});
        s.workers = std::max(workers, 1);
        s.out_dir = out_override.empty() ? fs::path(s.config.value("output_dir", "."))
                                         : fs::path(out_override);
        fs::create_directories(s.out_dir);

        const std::string mode = s.config.at("mode").get<std::string>();
        if (mode == "infer") return mode_infer(s);

        Rates rates = parse_rates(s.config.at("model").at("rates"),
                                  s.config.at("model").value("N", 0), s.base_dir);
        if (mode == "phase-scan") return mode_phase_scan(s, rates);

        ModelSpec spec = build_model(s, rates);
        if (mode == "simulate") return mode_simulate(s, spec);
        if (mode == "theory") return mode_theory(s, spec, rates);
        if (mode == "pde") return mode_pde(s, spec, rates);
        if (mode == "compare") return mode_compare(s, spec, rates);
        throw ConfigError("unknown mode: " + mode);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
