#include "ltasep/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ltasep::hydro {

namespace {

constexpr double kTieTol = 1e-9; // relative tie tolerance for phase boundaries

double boundary_current(double rate, double lambda_end, int ell) {
    return rate * (lambda_end - rate) / (lambda_end + (ell - 1) * rate);
}

} // namespace

std::string to_string(Phase p) {
    switch (p) {
        case Phase::LowDensityI: return "LD_I";
        case Phase::LowDensityII: return "LD_II";
        case Phase::HighDensityI: return "HD_I";
        case Phase::HighDensityII: return "HD_II";
        case Phase::MaximalCurrent: return "MC";
        case Phase::Coexistence: return "COEX";
    }
    return "?";
}

std::string to_string(BranchLabel b) {
    switch (b) {
        case BranchLabel::Lower: return "lower";
        case BranchLabel::Upper: return "upper";
        case BranchLabel::Indeterminate: return "indeterminate";
    }
    return "?";
}

double entry_density(double alpha, double lambda0, int ell) {
    if (!(alpha > 0.0)) throw std::invalid_argument("entry_density: alpha must be positive");
    if (!(lambda0 > 0.0)) throw std::invalid_argument("entry_density: lambda0 must be positive");
    return alpha / (lambda0 + (ell - 1) * alpha);
}

ExitDensities exit_densities(double beta, double lambda1, int ell) {
    if (!(beta > 0.0)) throw std::invalid_argument("exit_densities: beta must be positive");
    if (!(lambda1 > 0.0)) throw std::invalid_argument("exit_densities: lambda1 must be positive");
    if (beta > lambda1) return {0.0, 0.0, 0.0}; // instantaneous exit, clamped
    ExitDensities d;
    d.rho1_plus = (lambda1 - beta) / (lambda1 + (ell - 1) * beta);
    d.rho1_minus = beta * d.rho1_plus / lambda1;
    d.rho1 = ((ell - 1) * d.rho1_minus + d.rho1_plus) / ell;
    return d;
}

double critical_entry_rate(double lambda0, double lambda_min, int ell) {
    if (!(lambda0 > 0.0) || !(lambda_min > 0.0))
        throw std::invalid_argument("critical_entry_rate: rates must be positive");
    if (lambda_min > lambda0 * (1.0 + 1e-12))
        throw std::invalid_argument("critical_entry_rate: lambda_min exceeds lambda0");
    const double c = peak_normalized_flux(ell);
    const double b = lambda0 - (ell - 1) * c * lambda_min;
    const double disc = b * b - 4.0 * lambda0 * lambda_min * c;
    // Nonnegative whenever lambda_min <= lambda0; a sizable negative value
    // means the inputs were inconsistent.
    if (disc < -1e-12 * b * b)
        throw std::logic_error("critical_entry_rate: negative discriminant");
    return 0.5 * (b - std::sqrt(std::max(disc, 0.0)));
}

double critical_exit_rate(double lambda1, double lambda_min, int ell) {
    return critical_entry_rate(lambda1, lambda_min, ell);
}

BoundaryCurrents boundary_currents(double alpha, double beta, const RateField& rates, int ell) {
    BoundaryCurrents c;
    c.left = boundary_current(alpha, rates.lambda0(), ell);
    c.right = boundary_current(beta, rates.lambda1(), ell);
    c.max = rates.lambda_min() * peak_normalized_flux(ell);
    return c;
}

PhaseReport classify(double alpha, double beta, const RateField& rates, int ell) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("classify: alpha and beta must be positive");
    PhaseReport r;
    r.alpha = alpha;
    r.beta = beta;
    r.ell = ell;
    r.lambda0 = rates.lambda0();
    r.lambda1 = rates.lambda1();
    r.lambda_min = rates.lambda_min();
    r.alpha_star = critical_entry_rate(r.lambda0, r.lambda_min, ell);
    r.beta_star = critical_exit_rate(r.lambda1, r.lambda_min, ell);
    const BoundaryCurrents c = boundary_currents(alpha, beta, rates, ell);
    r.current_left = c.left;
    r.current_right = c.right;
    r.current_max = c.max;
    r.x_min = rates.minima();

    const bool alpha_crit = std::abs(alpha - r.alpha_star) <= kTieTol * std::max(1.0, r.alpha_star);
    const bool beta_crit = std::abs(beta - r.beta_star) <= kTieTol * std::max(1.0, r.beta_star);
    if (alpha_crit && beta_crit) r.boundary_tag = "triple-point";
    else if (alpha_crit) r.boundary_tag = "alpha-critical";
    else if (beta_crit) r.boundary_tag = "beta-critical";

    const bool sub_alpha = alpha < r.alpha_star;
    const bool sub_beta = beta < r.beta_star;
    if (sub_alpha && !sub_beta) {
        r.phase = Phase::LowDensityI;
        r.current = c.left;
    } else if (!sub_alpha && sub_beta) {
        r.phase = Phase::HighDensityI;
        r.current = c.right;
    } else if (!sub_alpha && !sub_beta) {
        r.phase = Phase::MaximalCurrent;
        r.current = c.max;
    } else {
        // Both boundary characteristics enter the lattice and collide; the
        // shock speed (J_R - J_L)/(rho_r - rho_l) with rho_r > rho_l decides.
        // J_L < J_R gives positive speed: the shock leaves through the right
        // end and the entry current fills the bulk (low density).
        const double tie = kTieTol * std::max({std::abs(c.left), std::abs(c.right), 1e-300});
        if (std::abs(c.left - c.right) <= tie) {
            r.phase = Phase::Coexistence;
            r.current = c.left;
            r.diagnostics.push_back("J_L = J_R: stationary shock, interior position not predicted");
        } else if (c.left < c.right) {
            r.phase = Phase::LowDensityII;
            r.current = c.left;
        } else {
            r.phase = Phase::HighDensityII;
            r.current = c.right;
        }
    }

    if (entry_density(alpha, r.lambda0, ell) >= 1.0 / ell)
        r.diagnostics.push_back("entry balance density >= 1/ell (alpha >= lambda0); "
                                "boundary value taken from the classified phase");

    const BoundaryTable table = boundary_table(r);
    r.rho0 = table.rho0;
    r.rho1_plus = table.rho1_plus;
    r.rho1_minus = table.rho1_minus;
    r.rho1 = table.rho1();
    return r;
}

PhaseReport classify(const ModelSpec& spec) {
    if (spec.geometry != Geometry::Open)
        throw std::invalid_argument("classify: phase diagram applies to open geometry");
    return classify(spec.alpha, spec.beta, spec.rates.field(), spec.particle_size);
}

double BoundaryTable::rho1() const {
    return ((ell - 1) * rho1_minus + rho1_plus) / ell;
}

BoundaryTable boundary_table(const PhaseReport& r) {
    BoundaryTable t;
    t.ell = r.ell;
    // Every row satisfies the same balances: J_c = alpha (1 - ell rho0) at
    // the entrance and J_c = beta rho1+ = lambda1 rho1- at the exit.
    if (r.low_density() || r.phase == Phase::Coexistence) {
        t.rho0 = entry_density(r.alpha, r.lambda0, r.ell);
        t.rho1_plus = r.current / r.beta;
        t.rho1_minus = r.current / r.lambda1;
    } else if (r.high_density()) {
        const ExitDensities d = exit_densities(r.beta, r.lambda1, r.ell);
        t.rho0 = 1.0 / r.ell - r.current / (r.ell * r.alpha);
        t.rho1_plus = d.rho1_plus;
        t.rho1_minus = r.current / r.lambda1;
    } else { // MC
        t.rho0 = 1.0 / r.ell - r.current / (r.ell * r.alpha);
        t.rho1_plus = r.current / r.beta;
        t.rho1_minus = r.current / r.lambda1;
    }
    return t;
}

double coexistence_beta(double lambda0, double lambda1, int ell, double alpha,
                        double lambda_min) {
    const double alpha_star = critical_entry_rate(lambda0, lambda_min, ell);
    if (alpha > alpha_star * (1.0 + 1e-12))
        throw std::invalid_argument("coexistence_beta: no root, alpha exceeds alpha*");
    const double target = boundary_current(alpha, lambda0, ell);
    const double beta_star = critical_exit_rate(lambda1, lambda_min, ell);
    // J_R is increasing on (0, beta*]; bisect J_R(beta) = J_L(alpha).
    double lo = 0.0, hi = beta_star;
    if (boundary_current(hi, lambda1, ell) < target - 1e-15)
        hi = lambda1 / (1.0 + std::sqrt(static_cast<double>(ell))); // peak of J_R
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (boundary_current(mid, lambda1, ell) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

ProfilePoint profile_point(double x, double w_from_current, int ell, Branch branch) {
    const double rho = branch_density(w_from_current, ell, branch);
    return {x, rho, branch == Branch::Lower ? BranchLabel::Lower : BranchLabel::Upper};
}

} // namespace

StationaryProfile stationary_profile(const PhaseReport& r, const RateField& rates,
                                     int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("stationary_profile: need grid_size >= 2");
    StationaryProfile prof;
    prof.current = r.current;
    const int ell = r.ell;

    // Uniform grid plus the exact minimizer locations (so the branch-switch
    // point is sampled exactly).
    std::vector<double> grid(grid_size);
    for (int i = 0; i < grid_size; ++i) grid[i] = static_cast<double>(i) / (grid_size - 1);
    if (r.phase == Phase::MaximalCurrent)
        grid.insert(grid.end(), r.x_min.begin(), r.x_min.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-15; }),
               grid.end());

    auto w_at = [&](double x) { return prof.current / rates(x); };

    if (r.low_density() || r.phase == Phase::Coexistence) {
        // Coexistence carries an interior shock at an unpredicted position;
        // report the lower branch (the profile left of the shock) everywhere
        // and leave the indeterminacy flagged in the report diagnostics.
        for (double x : grid) prof.points.push_back(profile_point(x, w_at(x), ell, Branch::Lower));
    } else if (r.high_density()) {
        for (double x : grid) prof.points.push_back(profile_point(x, w_at(x), ell, Branch::Upper));
    } else {
        // Maximal current. Homogeneous rates collapse both branches onto rho*.
        if (rates.homogeneous() || r.x_min.empty()) {
            const double rho_star = critical_density(ell);
            for (double x : grid) prof.points.push_back({x, rho_star, BranchLabel::Indeterminate});
        } else {
            const double first_min = r.x_min.front();
            const double last_min = r.x_min.back();
            const bool multiple = r.x_min.size() > 1;
            for (double x : grid) {
                if (std::abs(x - first_min) < 1e-15 || std::abs(x - last_min) < 1e-15) {
                    // Branches merge at a global minimizer: rho = rho*.
                    prof.points.push_back({x, critical_density(ell), BranchLabel::Indeterminate});
                } else if (x < first_min) {
                    prof.points.push_back(profile_point(x, w_at(x), ell, Branch::Upper));
                } else if (x > last_min) {
                    prof.points.push_back(profile_point(x, w_at(x), ell, Branch::Lower));
                } else {
                    // Between consecutive global minima the stationary profile
                    // jumps from lower back to upper branch at an unpredicted
                    // interior location; left unlabeled.
                    prof.points.push_back({x, std::numeric_limits<double>::quiet_NaN(),
                                           BranchLabel::Indeterminate});
                }
            }
            prof.discontinuities.push_back(first_min);
            if (multiple) prof.discontinuities.push_back(last_min);
        }
    }
    return prof;
}

StationaryProfile stationary_profile(const ModelSpec& spec, int grid_size) {
    const PhaseReport report = classify(spec);
    return stationary_profile(report, spec.rates.field(), grid_size);
}

double StationaryProfile::interpolate(double x) const {
    if (points.empty()) throw std::logic_error("StationaryProfile::interpolate: empty profile");
    if (x <= points.front().x) return points.front().rho;
    if (x >= points.back().x) return points.back().rho;
    auto it = std::lower_bound(points.begin(), points.end(), x,
                               [](const ProfilePoint& p, double v) { return p.x < v; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (hi.x == lo.x) return lo.rho;
    const double f = (x - lo.x) / (hi.x - lo.x);
    return lo.rho + f * (hi.rho - lo.rho);
}

void StationaryProfile::to_csv(std::ostream& os) const {
    os << "x,rho,branch\n" << std::setprecision(17);
    for (const auto& p : points)
        os << p.x << ',' << p.rho << ',' << to_string(p.branch) << '\n';
}

nlohmann::json PhaseReport::to_json() const {
    return nlohmann::json{{"phase", to_string(phase)},
                          {"boundary_tag", boundary_tag},
                          {"alpha", alpha},
                          {"beta", beta},
                          {"ell", ell},
                          {"lambda0", lambda0},
                          {"lambda1", lambda1},
                          {"lambda_min", lambda_min},
                          {"alpha_star", alpha_star},
                          {"beta_star", beta_star},
                          {"J_L", current_left},
                          {"J_R", current_right},
                          {"J_max", current_max},
                          {"J_c", current},
                          {"rho0", rho0},
                          {"rho1", rho1},
                          {"rho1_plus", rho1_plus},
                          {"rho1_minus", rho1_minus},
                          {"x_min", x_min},
                          {"diagnostics", diagnostics}};
}

std::vector<PhaseScanPoint> phase_scan(const RateField& rates, int ell,
                                       const std::vector<double>& alphas,
                                       const std::vector<double>& betas) {
    std::vector<PhaseScanPoint> out;
    out.reserve(alphas.size() * betas.size());
    for (double a : alphas)
        for (double b : betas) out.push_back({a, b, classify(a, b, rates, ell).phase});
    return out;
}

} // namespace ltasep::hydro
