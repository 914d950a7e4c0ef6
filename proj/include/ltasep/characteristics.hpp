#ifndef LTASEP_CHARACTERISTICS_HPP
#define LTASEP_CHARACTERISTICS_HPP

#include <iosfwd>
#include <vector>

#include "ltasep/rate_profile.hpp"

namespace ltasep::characteristics {

enum class Outcome { ReachedOppositeEnd, Reversed, MaxTimeExceeded };

struct TracePoint {
    double t, x, rho;
};

// A characteristic of the conservation law: dx/dt = lambda(x) H'(rho),
// drho/dt = -lambda'(x) H(rho). The current J = lambda(x) H(rho) is conserved
// along the trace.
struct Trace {
    std::vector<TracePoint> points;
    Outcome outcome = Outcome::MaxTimeExceeded;
    double current = 0.0;           // J(rho0, x0)
    double max_current_drift = 0.0; // max_t |J(rho^t, x^t) - J(rho0, x0)|
    double reversal_time = 0.0;     // set when outcome == Reversed (refined)
    double reversal_x = 0.0;
    double arrival_time = 0.0;      // set when outcome == ReachedOppositeEnd
    double exit_x = 0.0;            // boundary through which the trace left

    void to_csv(std::ostream& os) const; // columns t,x,rho
};

struct TraceOptions {
    double t_max = 100.0;
    double step = 1e-3;           // RK4 step
    double drift_tol = 1e-6;      // refuse the result if J drifts beyond this
    bool record_points = true;    // false keeps only endpoints (fast scans)
};

/// Integrate the characteristic ODE from (x0, rho0) with classic RK4.
/// Terminates on leaving [0,1], on reversal of dx/dt (the reversal time is
/// refined by bisection to 1e-9; the trace then continues until it returns
/// through its starting boundary), or at t_max. exit_x records the boundary
/// crossed. Throws std::runtime_error if the conserved current drifts beyond
/// drift_tol (step too large).
Trace trace(double x0, double rho0, const RateField& rates, int ell,
            const TraceOptions& options = {});

/// Arrival time at x_target by quadrature of 1 / (lambda(y) H'(H^{-1}(J/lambda(y)))).
/// Returns +infinity when the characteristic stalls before the target
/// (J reaches the local transport capacity somewhere along the way).
double travel_time(double x0, double rho0, double x_target, const RateField& rates, int ell);

/// Rankine-Hugoniot speed (J_right - J_left)/(rho_right - rho_left).
double shock_speed(double rho_left, double rho_right, double j_left, double j_right);

} // namespace ltasep::characteristics

#endif
