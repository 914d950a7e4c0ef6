#ifndef LTASEP_FLUX_HPP
#define LTASEP_FLUX_HPP

namespace ltasep {

// Scalar functions of the particle density for particles of size ell.
// Densities are reference-point densities, so the physical domain is
// [0, 1/ell]; inputs within kDomainTol of the boundary are clamped,
// anything further out throws std::domain_error.

inline constexpr double kDomainTol = 1e-12;

/// G(rho) = (1 - ell*rho) / (1 - (ell-1)*rho), the exclusion factor in [0,1].
double exclusion_factor(double rho, int ell);

/// H(rho) = rho * G(rho), the hop-rate-normalized flux.
double normalized_flux(double rho, int ell);

/// Analytic derivative H'(rho).
double normalized_flux_deriv(double rho, int ell);

/// Density maximizing H: rho* = 1 / (ell + sqrt(ell)).
double critical_density(int ell);

/// H(rho*) = 1 / (1 + sqrt(ell))^2.
double peak_normalized_flux(int ell);

enum class Branch { Lower, Upper };

/// Inverse of H on the requested branch: the solution of H(rho) = w with
/// rho <= rho* (Lower) or rho >= rho* (Upper). Requires 0 <= w <= H(rho*).
double branch_density(double w, int ell, Branch branch);

/// Systematic current J(rho, x) = lambda * H(rho).
double systematic_current(double rho, double lambda_x, int ell);

/// Diffusive current J_D(rho, x) = lambda * rho / (1 - (ell-1)*rho).
double diffusive_current(double rho, double lambda_x, int ell);

/// Hole current J^h(rho_h, x) = lambda * rho_h (1 - rho_h) / (1 + (ell-1) rho_h),
/// with rho_h in [0,1] the hole density 1 - ell*rho.
double hole_current(double rho_h, double lambda_x, int ell);

/// Fraction of lattice covered by particle bodies, ell * rho.
double coverage_density(double rho, int ell);

} // namespace ltasep

#endif
