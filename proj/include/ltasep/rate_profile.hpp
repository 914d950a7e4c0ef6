#ifndef LTASEP_RATE_PROFILE_HPP
#define LTASEP_RATE_PROFILE_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace ltasep {

enum class Interp { Linear, Constant };

std::string to_string(Interp interp);
Interp interp_from_string(const std::string& name);

// Continuum view of the hopping-rate landscape: lambda(x) and lambda'(x) on
// [0,1] together with the handful of statistics the phase diagram depends on
// (lambda(0), lambda(1), the minimum value and the set of global minimizers).
class RateField {
public:
    RateField(std::function<double(double)> value,
              std::function<double(double)> slope,
              double lambda0, double lambda1, double lambda_min,
              std::vector<double> minima);

    double operator()(double x) const { return value_(x); }
    double slope(double x) const { return slope_(x); }

    double lambda0() const { return lambda0_; }
    double lambda1() const { return lambda1_; }
    double lambda_min() const { return lambda_min_; }

    /// Global minimizers of lambda, sorted; empty for homogeneous fields.
    const std::vector<double>& minima() const { return minima_; }

    /// True when lambda is constant up to relative tolerance.
    bool homogeneous() const { return minima_.empty(); }

private:
    std::function<double(double)> value_;
    std::function<double(double)> slope_;
    double lambda0_, lambda1_, lambda_min_;
    std::vector<double> minima_;
};

// Discrete per-site hopping rates p_1..p_N plus the interpolation rule that
// extends them to lambda(x) on [0,1] with lambda(k/N) = p_k exactly.
// Lattice spacing a = 1/N; lambda is constant on [0, 1/N].
class RateProfile {
public:
    explicit RateProfile(std::vector<double> site_rates, Interp interp = Interp::Linear);

    int sites() const { return static_cast<int>(rates_.size()); }
    double spacing() const { return 1.0 / sites(); }
    Interp interpolation() const { return interp_; }
    const std::vector<double>& site_rates() const { return rates_; }
    double rate(int site) const; // 1-based

    double lambda(double x) const;
    double slope(double x) const;

    double lambda0() const { return rates_.front(); }
    double lambda1() const { return rates_.back(); }
    double lambda_min() const { return min_; }
    double lambda_max() const { return max_; }

    /// Global minimizers (cluster centers of sites within 1e-9*lambda_min of
    /// the minimum); empty when the profile is homogeneous at that tolerance.
    const std::vector<double>& minima() const { return minima_; }

    /// Continuum view sharing this profile's data.
    RateField field() const;

    /// Sample a continuum field at sites k/N, k = 1..N.
    static RateProfile sample(const RateField& f, int num_sites, Interp interp = Interp::Linear);

    nlohmann::json to_json() const;
    static RateProfile from_json(const nlohmann::json& j);
    void to_csv(std::ostream& os) const;
    static RateProfile from_csv(std::istream& is, Interp interp = Interp::Linear);

private:
    std::vector<double> rates_;
    Interp interp_;
    double min_, max_;
    std::vector<double> minima_;
};

// Named analytic rate functions; all smooth, all with exactly known minima.

/// lambda(x) = value.
RateField constant_rate(double value = 1.0);

/// lambda(x) = s*(x - 1) + 1 for s in (-1, 1).
RateField linear_rate(double s);

/// lambda(x) = 1 - depth * eta((x - center)/width) with eta the standard
/// mollifier bump, eta(0) = 1, support [-1, 1]. Minimum 1 - depth at center.
RateField bump_rate(double center, double width, double depth);

/// Two disjoint bumps of equal depth: two equal global minima.
RateField two_bump_rate(double center1, double center2, double width, double depth);

} // namespace ltasep

#endif
