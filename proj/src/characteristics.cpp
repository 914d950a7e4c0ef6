#include "ltasep/characteristics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ltasep/flux.hpp"

namespace ltasep::characteristics {

namespace {

// Unchecked evaluations: the integrator may poke a hair outside [0, 1/ell]
// mid-step, which the checked flux functions would reject.
double H_raw(double rho, int ell) {
    return rho * (1.0 - ell * rho) / (1.0 - (ell - 1) * rho);
}

double Hp_raw(double rho, int ell) {
    const double d = 1.0 - (ell - 1) * rho;
    return (1.0 - 2.0 * ell * rho + static_cast<double>(ell) * (ell - 1) * rho * rho) / (d * d);
}

struct State {
    double x, rho;
};

State rk4_step(const State& s, double h, const RateField& rates, int ell) {
    auto f = [&](const State& u) -> State {
        const double x = std::clamp(u.x, 0.0, 1.0);
        return {rates(x) * Hp_raw(u.rho, ell), -rates.slope(x) * H_raw(u.rho, ell)};
    };
    const State k1 = f(s);
    const State k2 = f({s.x + 0.5 * h * k1.x, s.rho + 0.5 * h * k1.rho});
    const State k3 = f({s.x + 0.5 * h * k2.x, s.rho + 0.5 * h * k2.rho});
    const State k4 = f({s.x + h * k3.x, s.rho + h * k3.rho});
    return {s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
            s.rho + h / 6.0 * (k1.rho + 2 * k2.rho + 2 * k3.rho + k4.rho)};
}

} // namespace

Trace trace(double x0, double rho0, const RateField& rates, int ell,
            const TraceOptions& options) {
    if (x0 < -1e-12 || x0 > 1.0 + 1e-12)
        throw std::invalid_argument("trace: x0 outside [0,1]");
    if (rho0 < -kDomainTol || rho0 > 1.0 / ell + kDomainTol)
        throw std::invalid_argument("trace: rho0 outside [0, 1/ell]");
    x0 = std::clamp(x0, 0.0, 1.0);
    rho0 = std::clamp(rho0, 0.0, 1.0 / ell);

    Trace tr;
    tr.current = rates(x0) * H_raw(rho0, ell);

    const double h = options.step;
    if (!(h > 0.0)) throw std::invalid_argument("trace: step must be positive");

    State s{x0, rho0};
    double t = 0.0;
    int sign = 0; // sign of dx/dt; established at the first nonzero value
    bool reversed = false;
    auto push = [&](double tt, const State& u) {
        if (options.record_points) tr.points.push_back({tt, u.x, u.rho});
    };
    push(0.0, s);

    while (t < options.t_max) {
        const State nxt = rk4_step(s, h, rates, ell);
        const double t_next = t + h;

        // Domain exit: interpolate the crossing point and stop.
        if (nxt.x < 0.0 || nxt.x > 1.0) {
            const double bound = nxt.x < 0.0 ? 0.0 : 1.0;
            const double f = (bound - s.x) / (nxt.x - s.x);
            const double t_hit = t + f * h;
            const State hit{bound, s.rho + f * (nxt.rho - s.rho)};
            push(t_hit, hit);
            if (reversed) {
                // Returned to (or past) its origin after reversing.
                tr.outcome = Outcome::Reversed;
            } else {
                tr.outcome = Outcome::ReachedOppositeEnd;
                tr.arrival_time = t_hit;
            }
            tr.exit_x = bound;
            return tr;
        }

        const double drift = std::abs(rates(nxt.x) * H_raw(nxt.rho, ell) - tr.current);
        tr.max_current_drift = std::max(tr.max_current_drift, drift);
        if (drift > options.drift_tol)
            throw std::runtime_error("trace: conserved current drifted by " +
                                     std::to_string(drift) + "; reduce the step size");

        const double hp = Hp_raw(nxt.rho, ell);
        const int new_sign = (hp > 0.0) - (hp < 0.0);
        if (sign == 0) sign = new_sign;
        if (!reversed && new_sign != 0 && sign != 0 && new_sign != sign) {
            // Refine the reversal time: bisect on the sub-step length.
            double lo = 0.0, hi = h;
            State at_hi = nxt;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                const State sm = rk4_step(s, mid, rates, ell);
                if (((Hp_raw(sm.rho, ell) > 0.0) - (Hp_raw(sm.rho, ell) < 0.0)) == sign) {
                    lo = mid;
                } else {
                    hi = mid;
                    at_hi = sm;
                }
            }
            reversed = true;
            tr.outcome = Outcome::Reversed;
            tr.reversal_time = t + hi;
            tr.reversal_x = at_hi.x;
            sign = new_sign;
            push(tr.reversal_time, at_hi);
        }

        s = nxt;
        t = t_next;
        push(t, s);
    }
    if (!reversed) tr.outcome = Outcome::MaxTimeExceeded;
    return tr;
}

double travel_time(double x0, double rho0, double x_target, const RateField& rates, int ell) {
    if (x_target == x0) return 0.0;
    const double j = systematic_current(rho0, rates(x0), ell);
    const double rho_star = critical_density(ell);
    const Branch branch = rho0 <= rho_star ? Branch::Lower : Branch::Upper;
    const int dir = branch == Branch::Lower ? +1 : -1;
    if ((x_target - x0) * dir <= 0.0)
        throw std::invalid_argument("travel_time: target lies against the direction of travel");

    // Stall check: the characteristic cannot pass any y with J >= lambda(y) H(rho*).
    const double lo = std::min(x0, x_target), hi = std::max(x0, x_target);
    double seg_min = std::min(rates(lo), rates(hi));
    constexpr int kScan = 512;
    for (int i = 1; i < kScan; ++i)
        seg_min = std::min(seg_min, rates(lo + (hi - lo) * i / kScan));
    for (double xm : rates.minima())
        if (xm >= lo && xm <= hi) seg_min = std::min(seg_min, rates(xm));
    const double capacity = seg_min * peak_normalized_flux(ell);
    if (j >= capacity * (1.0 - 1e-12)) return std::numeric_limits<double>::infinity();

    auto integrand = [&](double y) {
        const double lam = rates(y);
        const double rho = branch_density(j / lam, ell, branch);
        return 1.0 / (lam * Hp_raw(rho, ell));
    };
    using boost::math::quadrature::gauss_kronrod;
    const double f = gauss_kronrod<double, 31>::integrate(integrand, x0, x_target, 15, 1e-10);
    return f; // negative integrand over reversed limits gives a positive time
}

double shock_speed(double rho_left, double rho_right, double j_left, double j_right) {
    if (std::abs(rho_right - rho_left) < 1e-15)
        throw std::invalid_argument("shock_speed: coincident densities");
    return (j_right - j_left) / (rho_right - rho_left);
}

void Trace::to_csv(std::ostream& os) const {
    os << "t,x,rho\n" << std::setprecision(17);
    for (const auto& p : points) os << p.t << ',' << p.x << ',' << p.rho << '\n';
}

} // namespace ltasep::characteristics
