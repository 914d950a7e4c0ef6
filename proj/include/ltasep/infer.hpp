#ifndef LTASEP_INFER_HPP
#define LTASEP_INFER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace ltasep::infer {

// Observed stationary density profile: grid positions in [0,1] and the
// reference-point density at each.
struct DensityProfile {
    std::vector<double> x;
    std::vector<double> rho;

    static DensityProfile from_csv(std::istream& is);
    void to_csv(std::ostream& os) const;
};

struct Result {
    std::vector<double> x;
    std::vector<double> lambda;       // inferred rates, lambda(anchor) = 1; NaN where unreliable
    std::vector<double> lambda_naive; // 1/rho estimator, same normalization
    std::vector<bool> reliable;       // density inside the guard band
    double current = 0.0;             // J with the anchor time scale
    double alpha = 0.0;
    double beta = 0.0;
    double rho0 = 0.0, rho1 = 0.0, rho1_plus = 0.0, rho1_minus = 0.0;
    double lambda1 = 0.0;             // interior estimate extrapolated to x = 1
    double anchor_x = 0.0;
    int anchor_index = 0;
    std::vector<std::string> diagnostics;

    nlohmann::json to_json() const;
    void to_csv(std::ostream& os) const; // x,lambda_estimate,lambda_naive,reliability_flag
};

struct InferOptions {
    double anchor_x = 0.5;
    int smooth_window = 0;      // odd moving-average width; 0 disables
    double guard = 1e-4;        // sites with rho outside (guard, 1/ell - guard) are excluded
    double edge_exclude = 0.02; // fraction of sites next to x=1 excluded from the
                                // lambda1 extrapolation
};

/// Recover lambda(x), alpha and beta (up to the anchor time scale) from a
/// stationary density profile: J = rho(x0) G(rho(x0)) with lambda(x0) = 1,
/// lambda(x) = J / (rho G(rho)), alpha = J/(1 - ell rho0), beta = J/rho1+.
Result infer_rates(const DensityProfile& profile, int ell, const InferOptions& options = {});

/// The no-collision estimator lambda = const / rho, normalized at the anchor.
std::vector<double> naive_estimate(const DensityProfile& profile, int anchor_index);

} // namespace ltasep::infer

#endif
