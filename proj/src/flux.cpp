#include "ltasep/flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ltasep {

namespace {

double clamp_density(double rho, int ell, const char* who) {
    if (ell < 1) throw std::invalid_argument(std::string(who) + ": ell must be >= 1");
    const double hi = 1.0 / ell;
    if (rho < -kDomainTol || rho > hi + kDomainTol)
        throw std::domain_error(std::string(who) + ": rho = " + std::to_string(rho) +
                                " outside [0, 1/" + std::to_string(ell) + "]");
    return std::clamp(rho, 0.0, hi);
}

} // namespace

double exclusion_factor(double rho, int ell) {
    rho = clamp_density(rho, ell, "exclusion_factor");
    return (1.0 - ell * rho) / (1.0 - (ell - 1) * rho);
}

double normalized_flux(double rho, int ell) {
    rho = clamp_density(rho, ell, "normalized_flux");
    return rho * (1.0 - ell * rho) / (1.0 - (ell - 1) * rho);
}

double normalized_flux_deriv(double rho, int ell) {
    rho = clamp_density(rho, ell, "normalized_flux_deriv");
    const double d = 1.0 - (ell - 1) * rho;
    return (1.0 - 2.0 * ell * rho + static_cast<double>(ell) * (ell - 1) * rho * rho) / (d * d);
}

double critical_density(int ell) {
    if (ell < 1) throw std::invalid_argument("critical_density: ell must be >= 1");
    return 1.0 / (ell + std::sqrt(static_cast<double>(ell)));
}

double peak_normalized_flux(int ell) {
    if (ell < 1) throw std::invalid_argument("peak_normalized_flux: ell must be >= 1");
    const double s = 1.0 + std::sqrt(static_cast<double>(ell));
    return 1.0 / (s * s);
}

double branch_density(double w, int ell, Branch branch) {
    if (ell < 1) throw std::invalid_argument("branch_density: ell must be >= 1");
    const double peak = peak_normalized_flux(ell);
    if (w < -kDomainTol || w > peak + kDomainTol)
        throw std::domain_error("branch_density: w = " + std::to_string(w) +
                                " outside [0, H(rho*) = " + std::to_string(peak) + "]");
    w = std::clamp(w, 0.0, peak);
    const double b = 1.0 + (ell - 1) * w;
    const double disc = std::max(b * b - 4.0 * ell * w, 0.0);
    const double root = std::sqrt(disc);
    return branch == Branch::Lower ? (b - root) / (2.0 * ell) : (b + root) / (2.0 * ell);
}

double systematic_current(double rho, double lambda_x, int ell) {
    return lambda_x * normalized_flux(rho, ell);
}

double diffusive_current(double rho, double lambda_x, int ell) {
    rho = clamp_density(rho, ell, "diffusive_current");
    return lambda_x * rho / (1.0 - (ell - 1) * rho);
}

double hole_current(double rho_h, double lambda_x, int ell) {
    if (ell < 1) throw std::invalid_argument("hole_current: ell must be >= 1");
    if (rho_h < -kDomainTol || rho_h > 1.0 + kDomainTol)
        throw std::domain_error("hole_current: rho_h outside [0, 1]");
    rho_h = std::clamp(rho_h, 0.0, 1.0);
    return lambda_x * rho_h * (1.0 - rho_h) / (1.0 + (ell - 1) * rho_h);
}

double coverage_density(double rho, int ell) {
    return ell * clamp_density(rho, ell, "coverage_density");
}

} // namespace ltasep
