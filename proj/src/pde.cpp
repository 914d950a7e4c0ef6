#include "ltasep/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ltasep/flux.hpp"

namespace ltasep::pde {

namespace {

double H_raw(double rho, int ell) {
    return rho * (1.0 - ell * rho) / (1.0 - (ell - 1) * rho);
}

double G_raw(double rho, int ell) {
    return (1.0 - ell * rho) / (1.0 - (ell - 1) * rho);
}

// Concave-flux Godunov interface flux in supply/demand form: the upstream
// cell offers lambda_L H(min(rho_L, rho*)), the downstream cell accepts
// lambda_R H(max(rho_R, rho*)); the interface carries the smaller.
struct FluxKernel {
    int ell;
    double rho_star;

    double demand(double lam, double rho) const {
        return lam * H_raw(std::min(rho, rho_star), ell);
    }
    double supply(double lam, double rho) const {
        return lam * H_raw(std::max(rho, rho_star), ell);
    }
    double operator()(double lam_l, double rho_l, double lam_r, double rho_r) const {
        return std::min(demand(lam_l, rho_l), supply(lam_r, rho_r));
    }
};

std::vector<double> detect_jumps(const std::vector<double>& rho, int cells) {
    std::vector<double> jumps;
    double lo = rho[1], hi = rho[1];
    double mean_step = 0.0;
    for (int i = 1; i <= cells; ++i) {
        lo = std::min(lo, rho[i]);
        hi = std::max(hi, rho[i]);
        if (i > 1) mean_step += std::abs(rho[i] - rho[i - 1]);
    }
    mean_step /= std::max(cells - 1, 1);
    const double range = hi - lo;
    if (range <= 0.0) return jumps;
    for (int i = 1; i < cells; ++i) {
        const double d = std::abs(rho[i + 1] - rho[i]);
        if (d > 0.2 * range && d > 10.0 * mean_step)
            jumps.push_back(static_cast<double>(i) / cells); // interface position
    }
    return jumps;
}

} // namespace

Result solve_steady(const hydro::PhaseReport& report, const RateField& rates,
                    const Options& options) {
    const int m = options.cells;
    if (m < 2) throw std::invalid_argument("solve_steady: need at least 2 cells");
    const int ell = report.ell;
    const double dx = 1.0 / m;
    const FluxKernel flux{ell, critical_density(ell)};

    // Cell-centered rates, ghosts carrying the boundary rate values.
    std::vector<double> lam(m + 2);
    lam[0] = rates.lambda0();
    lam[m + 1] = rates.lambda1();
    double lam_max = std::max(lam[0], lam[m + 1]);
    for (int i = 1; i <= m; ++i) {
        lam[i] = rates((i - 0.5) * dx);
        lam_max = std::max(lam_max, lam[i]);
    }

    // Ghost densities encode the current-balance boundary conditions.
    const hydro::BoundaryTable table = hydro::boundary_table(report);
    const double rho_left = std::clamp(table.rho0, 0.0, 1.0 / ell);
    const double rho_right = std::clamp(table.rho1(), 0.0, 1.0 / ell);

    std::vector<double> rho(m + 2, critical_density(ell)); // neutral start
    rho[0] = rho_left;
    rho[m + 1] = rho_right;

    const double a = options.lattice_spacing > 0 ? options.lattice_spacing : dx;
    const double wave_speed = lam_max * ell;
    double dt = options.cfl * dx / wave_speed;
    if (options.viscous) {
        const double diff_max = 0.5 * a * lam_max * ell * ell;
        dt = std::min(dt, options.cfl * dx * dx / (2.0 * diff_max));
    }

    std::vector<double> f(m + 1), rho_new(m + 2);
    Result result;
    double delta = 0.0;
    long step = 0;
    for (; step < options.max_steps; ++step) {
        for (int i = 0; i <= m; ++i)
            f[i] = flux(lam[i], rho[i], lam[i + 1], rho[i + 1]);
        delta = 0.0;
        for (int i = 1; i <= m; ++i) {
            double update = -(f[i] - f[i - 1]) / dx;
            if (options.viscous) {
                const double vm = lam[i - 1] * G_raw(rho[i - 1], ell);
                const double v0 = lam[i] * G_raw(rho[i], ell);
                const double vp = lam[i + 1] * G_raw(rho[i + 1], ell);
                update -= 0.5 * a * (vp - 2.0 * v0 + vm) / (dx * dx);
            }
            rho_new[i] = std::clamp(rho[i] + dt * update, 0.0, 1.0 / ell);
            delta = std::max(delta, std::abs(rho_new[i] - rho[i]));
        }
        std::copy(rho_new.begin() + 1, rho_new.begin() + m + 1, rho.begin() + 1);
        if (delta < options.tol) {
            result.converged = true;
            ++step;
            break;
        }
    }

    result.steps = step;
    result.last_delta = delta;

    double f_lo = f[1], f_hi = f[1], f_sum = 0.0;
    for (int i = 1; i < m; ++i) {
        f_lo = std::min(f_lo, f[i]);
        f_hi = std::max(f_hi, f[i]);
        f_sum += f[i];
    }
    result.flux_spread = f_hi - f_lo;
    result.current = f_sum / (m - 1);

    result.profile.current = result.current;
    const double rho_star = critical_density(ell);
    for (int i = 1; i <= m; ++i) {
        hydro::BranchLabel label = hydro::BranchLabel::Indeterminate;
        if (rho[i] < rho_star - 1e-9) label = hydro::BranchLabel::Lower;
        else if (rho[i] > rho_star + 1e-9) label = hydro::BranchLabel::Upper;
        result.profile.points.push_back({(i - 0.5) * dx, rho[i], label});
    }
    result.profile.discontinuities = detect_jumps(rho, m);
    return result;
}

std::vector<double> evolve_free(std::vector<double> rho0, const RateField& rates, int ell,
                                double t_final, double cfl) {
    const int m = static_cast<int>(rho0.size());
    if (m < 2) throw std::invalid_argument("evolve_free: need at least 2 cells");
    const double dx = 1.0 / m;
    const FluxKernel flux{ell, critical_density(ell)};

    std::vector<double> lam(m + 2);
    double lam_max = 0.0;
    for (int i = 1; i <= m; ++i) {
        lam[i] = rates((i - 0.5) * dx);
        lam_max = std::max(lam_max, lam[i]);
    }
    lam[0] = lam[1];
    lam[m + 1] = lam[m];

    std::vector<double> rho(m + 2);
    std::copy(rho0.begin(), rho0.end(), rho.begin() + 1);
    const double dt_max = cfl * dx / (lam_max * ell);

    std::vector<double> f(m + 1);
    double t = 0.0;
    while (t < t_final) {
        const double dt = std::min(dt_max, t_final - t);
        rho[0] = rho[1]; // zero-gradient boundaries
        rho[m + 1] = rho[m];
        for (int i = 0; i <= m; ++i)
            f[i] = flux(lam[i], rho[i], lam[i + 1], rho[i + 1]);
        for (int i = 1; i <= m; ++i)
            rho[i] = std::clamp(rho[i] - dt / dx * (f[i] - f[i - 1]), 0.0, 1.0 / ell);
        t += dt;
    }
    return std::vector<double>(rho.begin() + 1, rho.begin() + m + 1);
}

} // namespace ltasep::pde
