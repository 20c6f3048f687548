#include "slngeo/ode.hpp"

#include <algorithm>
#include <cmath>

namespace slngeo {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th-order and the embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights for the quartic interpolant.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

OdeStatus integrate_dopri5(const OdeRhs& rhs, std::vector<double> y0, double t0, double t_end,
                           double dt_out, const OdeOptions& opts, const OdeProjection& project,
                           const OdeSampleSink& on_sample) {
    OdeStatus status;
    const std::size_t n = y0.size();
    const double dir = (t_end >= t0) ? 1.0 : -1.0;
    const double span = std::abs(t_end - t0);

    std::vector<double> y = std::move(y0);
    if (project) project(y);
    if (on_sample) on_sample(t0, y);
    status.t_reached = t0;
    if (span == 0.0) return status;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n), yerr(n);
    std::vector<double> r1(n), r2(n), r3(n), r4(n), r5(n), ydense(n);

    double t = t0;
    rhs(t, y, k1);

    // Initial step from the magnitudes of y and f, Hairer-style.
    double h;
    {
        double dny = 0.0, dnf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = opts.abs_tol + opts.rel_tol * std::abs(y[i]);
            dny += (y[i] / sk) * (y[i] / sk);
            dnf += (k1[i] / sk) * (k1[i] / sk);
        }
        h = (dnf > 1e-10 && dny > 1e-10) ? 0.01 * std::sqrt(dny / dnf) : 1e-6;
        h = std::min({h, span, opts.max_step});
    }

    long next_out = 1;  // index of the next dt_out sample to emit
    const bool have_stride = dt_out > 0.0;

    while (dir * (t_end - t) > 0.0) {
        if (status.steps_accepted + status.steps_rejected >= opts.max_steps) {
            status.truncated = true;
            status.reason = "maximum step count exceeded";
            break;
        }
        const double remaining = std::abs(t_end - t);
        h = std::min({h, opts.max_step, remaining});
        const bool final_step = (h >= remaining * (1.0 - 1e-14));
        if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
            status.truncated = true;
            status.reason = "step size underflow (state changing too fast to resolve)";
            break;
        }
        const double hs = dir * h;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
        rhs(t + c2 * hs, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * hs, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * hs, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * hs, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + hs, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + hs, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            yerr[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sk = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sk) * (yerr[i] / sk);
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (!std::isfinite(err) || !all_finite(ynew)) {
            status.steps_rejected++;
            h *= 0.25;
            continue;
        }

        if (err <= 1.0) {
            // Dense-output coefficients before projection touches ynew.
            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = hs * k1[i] - ydiff;
                r1[i] = y[i];
                r2[i] = ydiff;
                r3[i] = bspl;
                r4[i] = ydiff - hs * k7[i] - bspl;
                r5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                              d7 * k7[i]);
            }
            const double t_new = final_step ? t_end : t + hs;

            if (on_sample && have_stride) {
                while (true) {
                    const double t_out = t0 + dir * (static_cast<double>(next_out) * dt_out);
                    if (dir * (t_out - t_new) > 0.0 || dir * (t_out - t_end) >= 0.0) break;
                    const double theta = (t_out - t) / hs;
                    const double th1 = 1.0 - theta;
                    for (std::size_t i = 0; i < n; ++i)
                        ydense[i] = r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
                    if (project) project(ydense);
                    on_sample(t_out, ydense);
                    ++next_out;
                }
            }

            t = t_new;
            y.swap(ynew);
            if (project) {
                project(y);
                rhs(t, y, k1);  // projection invalidates the FSAL derivative
            } else {
                k1.swap(k7);
            }
            status.steps_accepted++;
            status.t_reached = t;

            double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            h *= std::clamp(factor, 0.2, 5.0);
        } else {
            status.steps_rejected++;
            h *= std::max(0.9 * std::pow(err, -0.2), 0.2);
        }
    }

    if (on_sample && !status.truncated) on_sample(t_end, y);
    if (status.truncated && on_sample && status.t_reached != t0) {
        // Emit the last reached state so callers can see where it stopped;
        // only when it is not already aligned with an emitted sample.
        const double last_emitted = t0 + dir * (static_cast<double>(next_out - 1) * dt_out);
        if (std::abs(status.t_reached - last_emitted) > 1e-14 * std::max(1.0, std::abs(t)))
            on_sample(status.t_reached, y);
    }
    return status;
}

}  // namespace slngeo
