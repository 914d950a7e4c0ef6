#ifndef LTASEP_HYDRO_HPP
#define LTASEP_HYDRO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "ltasep/flux.hpp"
#include "ltasep/model.hpp"
#include "ltasep/rate_profile.hpp"

namespace ltasep::hydro {

enum class Phase {
    LowDensityI,
    LowDensityII,
    HighDensityI,
    HighDensityII,
    MaximalCurrent,
    Coexistence, // J_L = J_R with both rates subcritical; stationary shock
};

std::string to_string(Phase p);

struct PhaseReport {
    Phase phase;
    std::string boundary_tag; // "", "alpha-critical", "beta-critical", "triple-point"
    double alpha = 0, beta = 0;
    int ell = 1;
    double lambda0 = 0, lambda1 = 0, lambda_min = 0;
    double alpha_star = 0, beta_star = 0;
    double current_left = 0;   // J_L
    double current_right = 0;  // J_R
    double current_max = 0;    // J_max
    double current = 0;        // J_c selected by the phase
    double rho0 = 0, rho1 = 0, rho1_plus = 0, rho1_minus = 0; // boundary densities, Table-style
    std::vector<double> x_min; // global minimizers of lambda (empty if homogeneous)
    std::vector<std::string> diagnostics;

    bool low_density() const { return phase == Phase::LowDensityI || phase == Phase::LowDensityII; }
    bool high_density() const { return phase == Phase::HighDensityI || phase == Phase::HighDensityII; }

    nlohmann::json to_json() const;
};

enum class BranchLabel { Lower, Upper, Indeterminate };

std::string to_string(BranchLabel b);

struct ProfilePoint {
    double x;
    double rho;
    BranchLabel branch;
};

struct StationaryProfile {
    std::vector<ProfilePoint> points;
    std::vector<double> discontinuities; // branch switches / shock locations
    double current = 0;                  // J_c

    double interpolate(double x) const;  // piecewise-linear in the points
    void to_csv(std::ostream& os) const; // columns x,rho,branch
};

/// Entry density rho_0 = alpha / (lambda0 + (ell-1) alpha).
/// Values >= 1/ell (possible for alpha >= lambda0, ell > 1) are returned
/// as-is; they signal a regime where the entry balance no longer applies.
double entry_density(double alpha, double lambda0, int ell);

struct ExitDensities {
    double rho1_plus;
    double rho1_minus;
    double rho1; // (1/ell) [ (ell-1) rho1_minus + rho1_plus ] = (1/ell)(1 - beta/lambda1)
};

/// Exit densities for beta <= lambda1; beta > lambda1 clamps to zero density.
ExitDensities exit_densities(double beta, double lambda1, int ell);

/// Critical entrance rate: the smaller root of J_L(alpha) = J_max.
double critical_entry_rate(double lambda0, double lambda_min, int ell);
/// Critical exit rate: same formula with lambda1 in place of lambda0.
double critical_exit_rate(double lambda1, double lambda_min, int ell);

struct BoundaryCurrents {
    double left;  // J_L
    double right; // J_R
    double max;   // J_max
};

BoundaryCurrents boundary_currents(double alpha, double beta, const RateField& rates, int ell);

/// Full phase classification from the four determining statistics.
PhaseReport classify(double alpha, double beta, const RateField& rates, int ell);
PhaseReport classify(const ModelSpec& spec);

/// Closed-form stationary density profile on a uniform grid of size m >= 2.
/// Grid points are augmented with the exact minimizer locations so the
/// branch-switch value rho* appears in the output.
StationaryProfile stationary_profile(const PhaseReport& report, const RateField& rates,
                                     int grid_size);
StationaryProfile stationary_profile(const ModelSpec& spec, int grid_size);

/// The beta on the LD/HD coexistence curve for a given alpha <= alpha*:
/// the root of J_R(beta) = J_L(alpha) in (0, beta*]. Throws if alpha > alpha*.
double coexistence_beta(double lambda0, double lambda1, int ell, double alpha,
                        double lambda_min);

struct BoundaryTable {
    double rho0;
    double rho1_plus;
    double rho1_minus;
    double rho1() const;
    int ell = 1;
};

/// Boundary densities for the classified phase (LD, HD and MC rows).
BoundaryTable boundary_table(const PhaseReport& report);

struct PhaseScanPoint {
    double alpha, beta;
    Phase phase;
};

/// Classify every point of an (alpha, beta) grid.
std::vector<PhaseScanPoint> phase_scan(const RateField& rates, int ell,
                                       const std::vector<double>& alphas,
                                       const std::vector<double>& betas);

} // namespace ltasep::hydro

#endif
