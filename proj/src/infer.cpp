#include "ltasep/infer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ltasep/flux.hpp"

namespace ltasep::infer {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> moving_average(const std::vector<double>& v, int window) {
    if (window <= 1) return v;
    if (window % 2 == 0) throw std::invalid_argument("smooth_window must be odd");
    const int n = static_cast<int>(v.size());
    const int half = window / 2;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double s = 0.0;
        for (int k = lo; k <= hi; ++k) s += v[k];
        out[i] = s / (hi - lo + 1);
    }
    return out;
}

// Least-squares line through (xs, ys) evaluated at x_eval.
double extrapolate_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                          double x_eval) {
    const int n = static_cast<int>(xs.size());
    if (n == 0) return kNaN;
    if (n == 1) return ys[0];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-30) return sy / n;
    const double slope = (n * sxy - sx * sy) / det;
    const double icept = (sy - slope * sx) / n;
    return icept + slope * x_eval;
}

} // namespace

DensityProfile DensityProfile::from_csv(std::istream& is) {
    DensityProfile p;
    std::string line;
    bool site_format = false;
    bool have_header = false;
    std::vector<std::pair<double, double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (!have_header && line.find_first_not_of("0123456789.,+-eE \t") != std::string::npos) {
            have_header = true;
            site_format = line.rfind("site", 0) == 0;
            continue;
        }
        std::istringstream ss(line);
        double a = 0, b = 0;
        char comma = 0;
        if (!(ss >> a >> comma >> b) || comma != ',')
            throw std::runtime_error("DensityProfile::from_csv: malformed line: " + line);
        rows.emplace_back(a, b);
    }
    if (rows.empty()) throw std::runtime_error("DensityProfile::from_csv: no data");
    if (site_format) {
        const double n = rows.back().first; // site indices 1..N -> x = k/N
        for (auto& [site, rho] : rows) {
            p.x.push_back(site / n);
            p.rho.push_back(rho);
        }
    } else {
        for (auto& [x, rho] : rows) {
            p.x.push_back(x);
            p.rho.push_back(rho);
        }
    }
    return p;
}

void DensityProfile::to_csv(std::ostream& os) const {
    os << "x,rho\n" << std::setprecision(17);
    for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << ',' << rho[i] << '\n';
}

Result infer_rates(const DensityProfile& profile, int ell, const InferOptions& options) {
    const int n = static_cast<int>(profile.x.size());
    if (n < 4) throw std::invalid_argument("infer_rates: need at least 4 profile points");
    if (profile.rho.size() != profile.x.size())
        throw std::invalid_argument("infer_rates: x/rho size mismatch");

    Result r;
    r.x = profile.x;
    const std::vector<double> rho = moving_average(profile.rho, options.smooth_window);

    // Anchor: nearest grid point; its density must sit inside the guard band.
    int anchor = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(profile.x[i] - options.anchor_x) < std::abs(profile.x[anchor] - options.anchor_x))
            anchor = i;
    const double hi_guard = 1.0 / ell - options.guard;
    if (!(rho[anchor] > options.guard) || !(rho[anchor] < hi_guard))
        throw std::invalid_argument("infer_rates: anchor density too close to 0 or 1/ell; "
                                    "pick a different anchor");
    r.anchor_index = anchor;
    r.anchor_x = profile.x[anchor];

    // Step 1+2: lambda(anchor) = 1 fixes the time scale; J follows from the
    // anchor density, then lambda everywhere from the same relation.
    r.current = normalized_flux(rho[anchor], ell);
    r.lambda.assign(n, kNaN);
    r.reliable.assign(n, false);
    int excluded = 0;
    for (int i = 0; i < n; ++i) {
        if (rho[i] > options.guard && rho[i] < hi_guard) {
            r.lambda[i] = r.current / normalized_flux(rho[i], ell);
            r.reliable[i] = true;
        } else {
            ++excluded;
        }
    }
    if (excluded > 0)
        r.diagnostics.push_back(std::to_string(excluded) +
                                " site(s) outside the density guard band; lambda not estimated there");

    r.lambda_naive = naive_estimate({profile.x, rho}, anchor);

    // Step 3: boundary rates. The entry balance J = alpha (1 - ell rho0)
    // inverts directly; the exit needs rho1+ which for ell > 1 is recovered
    // through lambda(1) extrapolated from the interior (the boundary site
    // itself does not satisfy the bulk relation).
    r.rho0 = profile.rho.front();
    r.rho1 = profile.rho.back();
    const double hole0 = 1.0 - ell * r.rho0;
    if (hole0 > options.guard) {
        r.alpha = r.current / hole0;
    } else {
        r.alpha = kNaN;
        r.diagnostics.push_back("entry density too close to 1/ell; alpha not identified");
    }

    std::vector<double> xs, ys;
    const double x_hi = 1.0 - options.edge_exclude;
    const double x_lo = 1.0 - 5.0 * options.edge_exclude;
    for (int i = 0; i < n; ++i)
        if (r.reliable[i] && profile.x[i] >= x_lo && profile.x[i] <= x_hi) {
            xs.push_back(profile.x[i]);
            ys.push_back(r.lambda[i]);
        }
    r.lambda1 = extrapolate_linear(xs, ys, 1.0);
    if (std::isnan(r.lambda1)) {
        r.diagnostics.push_back("no reliable sites for the lambda(1) extrapolation");
        r.beta = kNaN;
    } else {
        r.rho1_minus = r.current / r.lambda1;
        r.rho1_plus = ell * r.rho1 - (ell - 1) * r.rho1_minus;
        if (r.rho1_plus > options.guard) {
            r.beta = r.current / r.rho1_plus;
        } else {
            r.beta = kNaN;
            r.diagnostics.push_back("exit split density nonpositive; beta not identified");
        }
    }

    // Phase-conditional confidence: in a low-density bulk the exit rate only
    // enters through the boundary value (and vice versa), so the matching
    // estimate rests on a single site.
    const double rho_star = critical_density(ell);
    int above = 0, below = 0;
    for (int i = 0; i < n; ++i) {
        if (!r.reliable[i]) continue;
        (rho[i] > rho_star ? above : below)++;
    }
    if (below > 0 && above == 0)
        r.diagnostics.push_back("low-density bulk: beta estimate rests on the boundary site only");
    if (above > 0 && below == 0)
        r.diagnostics.push_back("high-density bulk: alpha estimate rests on the boundary site only");

    return r;
}

std::vector<double> naive_estimate(const DensityProfile& profile, int anchor_index) {
    const int n = static_cast<int>(profile.rho.size());
    if (anchor_index < 0 || anchor_index >= n)
        throw std::invalid_argument("naive_estimate: anchor out of range");
    const double rho_anchor = profile.rho[anchor_index];
    if (!(rho_anchor > 0.0)) throw std::invalid_argument("naive_estimate: anchor density is zero");
    std::vector<double> out(n, kNaN);
    for (int i = 0; i < n; ++i)
        if (profile.rho[i] > 0.0) out[i] = rho_anchor / profile.rho[i];
    return out;
}

nlohmann::json Result::to_json() const {
    return nlohmann::json{{"current", current},
                          {"alpha", alpha},
                          {"beta", beta},
                          {"rho0", rho0},
                          {"rho1", rho1},
                          {"rho1_plus", rho1_plus},
                          {"rho1_minus", rho1_minus},
                          {"lambda1", lambda1},
                          {"anchor_x", anchor_x},
                          {"anchor_index", anchor_index},
                          {"diagnostics", diagnostics}};
}

void Result::to_csv(std::ostream& os) const {
    os << "x,lambda_estimate,lambda_naive,reliability_flag\n" << std::setprecision(17);
    for (std::size_t i = 0; i < x.size(); ++i)
        os << x[i] << ',' << lambda[i] << ',' << lambda_naive[i] << ','
           << (reliable[i] ? 1 : 0) << '\n';
}

} // namespace ltasep::infer
