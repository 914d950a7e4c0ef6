#include "ltasep/rate_profile.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ltasep {

std::string to_string(Interp interp) {
    return interp == Interp::Linear ? "linear" : "constant";
}

Interp interp_from_string(const std::string& name) {
    if (name == "linear") return Interp::Linear;
    if (name == "constant") return Interp::Constant;
    throw std::invalid_argument("unknown interpolation rule: " + name);
}

RateField::RateField(std::function<double(double)> value,
                     std::function<double(double)> slope,
                     double lambda0, double lambda1, double lambda_min,
                     std::vector<double> minima)
    : value_(std::move(value)),
      slope_(std::move(slope)),
      lambda0_(lambda0),
      lambda1_(lambda1),
      lambda_min_(lambda_min),
      minima_(std::move(minima)) {}

namespace {

// Cluster sites whose rate is within 1e-9*min of the minimum; adjacent
// qualifying sites (flat troughs) collapse into their midpoint. A cluster
// spanning the whole lattice means the profile is homogeneous.
std::vector<double> detect_minima(const std::vector<double>& rates, double min_rate) {
    const double tol = 1e-9 * min_rate;
    const int n = static_cast<int>(rates.size());
    std::vector<double> minima;
    int run_start = -1;
    int total_qualifying = 0;
    auto flush = [&](int run_end) {
        if (run_start < 0) return;
        const double mid = 0.5 * (run_start + run_end + 2); // sites are 1-based
        minima.push_back(mid / n);
        run_start = -1;
    };
    for (int i = 0; i < n; ++i) {
        if (rates[i] <= min_rate + tol) {
            ++total_qualifying;
            if (run_start < 0) run_start = i;
        } else {
            flush(i - 1);
        }
    }
    flush(n - 1);
    if (total_qualifying == n) return {}; // homogeneous
    return minima;
}

} // namespace

RateProfile::RateProfile(std::vector<double> site_rates, Interp interp)
    : rates_(std::move(site_rates)), interp_(interp) {
    if (rates_.empty()) throw std::invalid_argument("RateProfile: empty rate list");
    for (double r : rates_)
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("RateProfile: all site rates must be positive");
    min_ = *std::min_element(rates_.begin(), rates_.end());
    max_ = *std::max_element(rates_.begin(), rates_.end());
    minima_ = detect_minima(rates_, min_);
}

double RateProfile::rate(int site) const {
    if (site < 1 || site > sites())
        throw std::out_of_range("RateProfile::rate: site out of range");
    return rates_[site - 1];
}

double RateProfile::lambda(double x) const {
    const int n = sites();
    if (x < -1e-12 || x > 1.0 + 1e-12)
        throw std::domain_error("RateProfile::lambda: x outside [0,1]");
    x = std::clamp(x, 0.0, 1.0);
    if (interp_ == Interp::Constant) {
        // lambda(x) = p_ceil(x*N); constant on ((k-1)/N, k/N]. Snap to the
        // node when x*N is an integer up to rounding.
        const double u = x * n;
        const long nearest = std::lround(u);
        int k = (std::abs(u - nearest) < 1e-9) ? static_cast<int>(nearest)
                                               : static_cast<int>(std::ceil(u));
        k = std::clamp(k, 1, n);
        return rates_[k - 1];
    }
    // Linear between nodes at k/N, constant extension on [0, 1/N]. Snap to
    // the node when x*N is an integer up to rounding, so lambda(k/N) = p_k
    // holds exactly.
    const double u = x * n;
    const long nearest = std::lround(u);
    if (std::abs(u - nearest) < 1e-9 && nearest >= 1 && nearest <= n)
        return rates_[nearest - 1];
    if (u <= 1.0) return rates_[0];
    const int k = std::min(static_cast<int>(u), n - 1); // node index left of x
    const double frac = u - k;
    if (frac <= 0.0) return rates_[k - 1];
    return rates_[k - 1] + frac * (rates_[k] - rates_[k - 1]);
}

double RateProfile::slope(double x) const {
    const int n = sites();
    x = std::clamp(x, 0.0, 1.0);
    if (interp_ == Interp::Constant) return 0.0;
    const double u = x * n;
    if (u <= 1.0) return 0.0;
    const int k = std::min(static_cast<int>(u), n - 1);
    return (rates_[k] - rates_[k - 1]) * n;
}

RateField RateProfile::field() const {
    auto self = std::make_shared<RateProfile>(*this);
    return RateField([self](double x) { return self->lambda(x); },
                     [self](double x) { return self->slope(x); },
                     lambda0(), lambda1(), min_, minima_);
}

RateProfile RateProfile::sample(const RateField& f, int num_sites, Interp interp) {
    if (num_sites < 1) throw std::invalid_argument("RateProfile::sample: need at least one site");
    std::vector<double> rates(num_sites);
    for (int k = 1; k <= num_sites; ++k)
        rates[k - 1] = f(static_cast<double>(k) / num_sites);
    return RateProfile(std::move(rates), interp);
}

nlohmann::json RateProfile::to_json() const {
    return nlohmann::json{{"rates", rates_}, {"interpolation", to_string(interp_)}};
}

RateProfile RateProfile::from_json(const nlohmann::json& j) {
    auto rates = j.at("rates").get<std::vector<double>>();
    Interp interp = Interp::Linear;
    if (j.contains("interpolation")) interp = interp_from_string(j.at("interpolation").get<std::string>());
    return RateProfile(std::move(rates), interp);
}

void RateProfile::to_csv(std::ostream& os) const {
    os << "site_index,rate\n" << std::setprecision(17);
    for (int k = 1; k <= sites(); ++k) os << k << ',' << rates_[k - 1] << '\n';
}

RateProfile RateProfile::from_csv(std::istream& is, Interp interp) {
    std::string line;
    std::vector<std::pair<int, double>> entries;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.find("site_index") != std::string::npos) continue;
        }
        std::istringstream ss(line);
        int site = 0;
        double rate = 0;
        char comma = 0;
        if (!(ss >> site >> comma >> rate) || comma != ',')
            throw std::runtime_error("RateProfile::from_csv: malformed line: " + line);
        entries.emplace_back(site, rate);
    }
    if (entries.empty()) throw std::runtime_error("RateProfile::from_csv: no data rows");
    std::sort(entries.begin(), entries.end());
    std::vector<double> rates;
    rates.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].first != static_cast<int>(i) + 1)
            throw std::runtime_error("RateProfile::from_csv: site indices must be 1..N");
        rates.push_back(entries[i].second);
    }
    return RateProfile(std::move(rates), interp);
}

RateField constant_rate(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("constant_rate: value must be positive");
    return RateField([value](double) { return value; }, [](double) { return 0.0; },
                     value, value, value, {});
}

RateField linear_rate(double s) {
    if (std::abs(s) >= 1.0) throw std::invalid_argument("linear_rate: |s| must be < 1");
    auto value = [s](double x) { return s * (x - 1.0) + 1.0; };
    auto slope = [s](double) { return s; };
    if (s > 0.0) return RateField(value, slope, 1.0 - s, 1.0, 1.0 - s, {0.0});
    if (s < 0.0) return RateField(value, slope, 1.0 - s, 1.0, 1.0, {1.0});
    return RateField(value, slope, 1.0, 1.0, 1.0, {});
}

namespace {

// Standard mollifier scaled to eta(0) = 1: exp(1 - 1/(1-u^2)) on (-1,1).
double mollifier(double u) {
    const double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
}

double mollifier_deriv(double u) {
    const double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    const double d = 1.0 - u2;
    return mollifier(u) * (-2.0 * u / (d * d));
}

} // namespace

RateField bump_rate(double center, double width, double depth) {
    if (!(width > 0.0)) throw std::invalid_argument("bump_rate: width must be positive");
    if (!(depth > 0.0) || depth >= 1.0) throw std::invalid_argument("bump_rate: depth must be in (0,1)");
    auto value = [=](double x) { return 1.0 - depth * mollifier((x - center) / width); };
    auto slope = [=](double x) { return -depth / width * mollifier_deriv((x - center) / width); };
    return RateField(value, slope, value(0.0), value(1.0), 1.0 - depth, {center});
}

RateField two_bump_rate(double center1, double center2, double width, double depth) {
    if (!(width > 0.0)) throw std::invalid_argument("two_bump_rate: width must be positive");
    if (!(depth > 0.0) || depth >= 1.0) throw std::invalid_argument("two_bump_rate: depth must be in (0,1)");
    if (center2 - center1 < 2.0 * width)
        throw std::invalid_argument("two_bump_rate: bump supports must be disjoint");
    auto value = [=](double x) {
        return 1.0 - depth * (mollifier((x - center1) / width) + mollifier((x - center2) / width));
    };
    auto slope = [=](double x) {
        return -depth / width *
               (mollifier_deriv((x - center1) / width) + mollifier_deriv((x - center2) / width));
    };
    return RateField(value, slope, value(0.0), value(1.0), 1.0 - depth, {center1, center2});
}

} // namespace ltasep
