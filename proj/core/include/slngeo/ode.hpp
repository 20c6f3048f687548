#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace slngeo {

/// dydt = f(t, y) over flat state vectors.
using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

/// Optional post-step constraint projection; mutates y in place. Applied
/// after every accepted step and to every emitted dense-output sample.
using OdeProjection = std::function<void(std::vector<double>& y)>;

/// Sample sink, called at t0, t0 + dt_out, ..., t_end (dense interpolation).
using OdeSampleSink = std::function<void(double t, const std::vector<double>& y)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

struct OdeStatus {
    bool truncated = false;
    std::string reason;
    double t_reached = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
};

/// Embedded Dormand-Prince 5(4) pair with the classic quartic dense-output
/// interpolant. Integrates from t0 to t_end (backward when t_end < t0),
/// emitting samples every dt_out plus the exact endpoint. On step-size
/// underflow or a non-finite state the integration stops early and the
/// status carries a diagnostic; samples emitted so far remain valid.
OdeStatus integrate_dopri5(const OdeRhs& rhs, std::vector<double> y0, double t0, double t_end,
                           double dt_out, const OdeOptions& opts, const OdeProjection& project,
                           const OdeSampleSink& on_sample);

}  // namespace slngeo
