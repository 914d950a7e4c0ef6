#ifndef LTASEP_PDE_HPP
#define LTASEP_PDE_HPP

#include <vector>

#include "ltasep/hydro.hpp"
#include "ltasep/rate_profile.hpp"

namespace ltasep::pde {

struct Options {
    int cells = 1000;
    double tol = 1e-12;          // stop when ||rho^{n+1} - rho^n||_inf < tol
    long max_steps = 5000000;
    double cfl = 0.8;
    bool viscous = false;        // include the O(a) correction term
    double lattice_spacing = 0;  // a in the viscous term; 0 means 1/cells
};

struct Result {
    hydro::StationaryProfile profile; // cell centers
    bool converged = false;
    long steps = 0;
    double last_delta = 0.0;  // final per-sweep density change
    double flux_spread = 0.0; // max - min interior interface flux at the end
    double current = 0.0;     // mean interface flux
};

/// Relax the conservation law d_t rho = -d_x[lambda(x) H(rho)] to steady
/// state with a supply/demand (Godunov) flux and ghost cells pinned to the
/// classified phase's boundary densities. Optionally includes the dissipative
/// -a/2 d_xx[lambda G(rho)] correction.
Result solve_steady(const hydro::PhaseReport& report, const RateField& rates,
                    const Options& options = {});

/// Transient evolution with zero-gradient boundaries; returns the cell
/// densities at t_final. Used to examine wave structure (rarefactions).
std::vector<double> evolve_free(std::vector<double> rho0, const RateField& rates, int ell,
                                double t_final, double cfl = 0.8);

} // namespace ltasep::pde

#endif
