#include "slngeo/integrate.hpp"

#include <cmath>

#include "slngeo/geometry.hpp"
#include "slngeo/linalg.hpp"

namespace slngeo {

namespace {

void copy_into(const SquareMatrix& m, std::vector<double>& y, std::size_t offset) {
    const auto& d = m.data();
    std::copy(d.begin(), d.end(), y.begin() + static_cast<std::ptrdiff_t>(offset));
}

SquareMatrix slice(const std::vector<double>& y, std::size_t offset, int n) {
    return SquareMatrix(n, std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(offset),
                                               y.begin() + static_cast<std::ptrdiff_t>(offset + static_cast<std::size_t>(n) * n)));
}

struct GeodesicCore {
    // dA/dt = Adot, dAdot/dt = c A^-T with c = tr((Adot A^-1)^2) / tr(A^-1 A^-T).
    static void eval(const SquareMatrix& a, const SquareMatrix& adot, SquareMatrix& acc) {
        const SquareMatrix ai = inverse(a);
        const SquareMatrix v = adot * ai;
        const double c = trace_product(v, v) / hs_inner(ai, ai);
        acc = c * ai.transpose();
    }
};

// Rescale A to unit determinant and re-project the velocity onto the tangent
// space; keeps the constraint error at roundoff without changing the order
// of accuracy.
void project_phase_flat(std::vector<double>& y, int n) {
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    SquareMatrix a = slice(y, 0, n);
    SquareMatrix adot = slice(y, nn, n);
    const double det = determinant(a);
    if (det > 0.0) a *= std::pow(det, -1.0 / n);
    const SquareMatrix ai = inverse(a);
    const SquareMatrix ait = ai.transpose();
    adot -= (trace_product(ai, adot) / hs_inner(ait, ait)) * ait;
    copy_into(a, y, 0);
    copy_into(adot, y, nn);
}

// Symmetrize, restore det(beta) = 1 by rescaling, and remove the trace part
// of omega that violates tr(beta omega) = 0.
void project_reduced_flat(std::vector<double>& y, int n) {
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    SquareMatrix beta = symmetric_part(slice(y, 0, n));
    SquareMatrix omega = symmetric_part(slice(y, nn, n));
    const double det = determinant(beta);
    if (det > 0.0) beta *= std::pow(det, -1.0 / n);
    const double c = trace_product(beta, omega) / beta.trace();
    for (int i = 0; i < n; ++i) omega(i, i) -= c;
    copy_into(beta, y, 0);
    copy_into(omega, y, nn);
}

void project_jacobi_flat(std::vector<double>& y, int n) {
    project_phase_flat(y, n);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const SquareMatrix a = slice(y, 0, n);
    const SquareMatrix adot = slice(y, nn, n);
    SquareMatrix j = slice(y, 2 * nn, n);
    SquareMatrix jdot = slice(y, 3 * nn, n);
    const SquareMatrix ai = inverse(a);
    const SquareMatrix ait = ai.transpose();
    const double nsq = hs_inner(ait, ait);
    j -= (trace_product(ai, j) / nsq) * ait;
    // Tangency of J propagates as tr(J' A^-1) = tr(J A^-1 A' A^-1).
    const double target = trace_product(j, ai * adot * ai);
    jdot -= ((trace_product(ai, jdot) - target) / nsq) * ait;
    copy_into(j, y, 2 * nn);
    copy_into(jdot, y, 3 * nn);
}

SquareMatrix jacobi_rhs_core(const SquareMatrix& a, const SquareMatrix& adot, const SquareMatrix& j,
                             const SquareMatrix& jdot) {
    const SquareMatrix ai = inverse(a);
    const SquareMatrix ait = ai.transpose();
    const SquareMatrix v = ai * adot;           // A^-1 A'
    const SquareMatrix vai = v * ai;            // A^-1 A' A^-1
    const double h = hs_inner(ai, ai);          // tr(A^-1 A^-T)
    const double g = trace_product(v, v);       // tr((A^-1 A')^2)

    const double c1 = (2.0 * trace_product(jdot, vai) - 2.0 * trace_product(adot * ai * j, vai)) / h;
    const double c2 = (g / (h * h)) * 2.0 * trace_product(ai * j, ai * ait);
    return (c1 + c2) * ait - (g / h) * (ait * j.transpose() * ait);
}

struct PhaseRefs {
    double energy;
    SquareMatrix zeta0;
    SquareMatrix angmom0;
};

SquareMatrix phase_zeta(const SquareMatrix& a, const SquareMatrix& adot) {
    return a.transpose() * adot - adot.transpose() * a;
}

SquareMatrix phase_angmom(const SquareMatrix& a, const SquareMatrix& adot) {
    return adot * a.transpose() - a * adot.transpose();
}

InvariantReport phase_report(const GroupPoint& a, const SquareMatrix& adot, const PhaseRefs& ref) {
    InvariantReport r;
    r.energy = hs_inner(adot, adot);
    r.det_drift = std::abs(a.det() - 1.0);
    r.zeta_drift = hs_norm(phase_zeta(a.mat(), adot) - ref.zeta0);
    r.angmom_drift = hs_norm(phase_angmom(a.mat(), adot) - ref.angmom0);
    const SquareMatrix& ai = a.inv();
    const SquareMatrix v = ai * adot;
    r.sff = trace_product(v, v) / hs_norm(ai);
    r.trace_omega = 2.0 * hs_inner(a.mat(), adot);
    return r;
}

void reduced_rhs_core(const SquareMatrix& beta, const SquareMatrix& omega, const SquareMatrix& zeta,
                      SquareMatrix& beta_dot, SquareMatrix& omega_dot) {
    beta_dot = -1.0 * (beta * omega * beta);
    const SquareMatrix sum = omega + zeta;
    omega_dot = 0.5 * (sum.transpose() * beta * sum);
    const SquareMatrix ob = omega * beta;
    const SquareMatrix zb = zeta * beta;
    const double tr_terms = 0.5 * (trace_product(ob, ob) + trace_product(zb, zb)) / beta.trace();
    for (int i = 0; i < beta.dim(); ++i) omega_dot(i, i) += tr_terms;
    omega_dot = symmetric_part(omega_dot);
}

double reduced_energy(const SquareMatrix& beta, const SquareMatrix& omega, const SquareMatrix& zeta) {
    // 1/4 tr((omega+zeta)^T beta (omega+zeta)) = <A',A'> exactly.
    const SquareMatrix s = omega + zeta;
    return 0.25 * trace_product(s.transpose() * beta, s);
}

InvariantReport reduced_report(const SquareMatrix& beta, const SquareMatrix& omega,
                               const SquareMatrix& zeta, const SquareMatrix& zeta0) {
    InvariantReport r;
    r.energy = reduced_energy(beta, omega, zeta);
    r.det_drift = std::abs(determinant(beta) - 1.0);
    r.zeta_drift = hs_norm(zeta - zeta0);
    r.angmom_drift = 0.0;  // not observable in the radial variables
    r.sff = sff_reduced(beta, omega, zeta);
    r.trace_omega = omega.trace();
    return r;
}

// Central-difference virial monitor over the emitted samples:
// d^2/dt^2 |A|^2 should equal 2 |A'|^2 + 2 n II(A',A') / |A^-1|.
void fill_virial(Trajectory& traj, const std::vector<double>& norm_sq,
                 const std::vector<double>& inv_norm, int n) {
    const std::size_t count = traj.samples.size();
    if (count < 3) return;
    for (std::size_t k = 1; k + 1 < count; ++k) {
        const double dt1 = traj.samples[k].t - traj.samples[k - 1].t;
        const double dt2 = traj.samples[k + 1].t - traj.samples[k].t;
        if (std::abs(dt1 - dt2) > 1e-9 * std::max(std::abs(dt1), std::abs(dt2))) continue;
        const double fd = (norm_sq[k + 1] - 2.0 * norm_sq[k] + norm_sq[k - 1]) / (dt1 * dt2);
        const InvariantReport& rep = traj.samples[k].report;
        const double expected = 2.0 * rep.energy + 2.0 * n * rep.sff / inv_norm[k];
        traj.samples[k].report.virial_residual = std::abs(fd - expected);
    }
}

}  // namespace

SquareMatrix geodesic_rhs(const PhaseState& s) {
    const SquareMatrix& ai = s.A().inv();
    const SquareMatrix v = s.Adot() * ai;
    const double c = trace_product(v, v) / hs_inner(ai, ai);
    return c * ai.transpose();
}

std::pair<SquareMatrix, SquareMatrix> reduced_rhs(const ReducedState& s) {
    SquareMatrix beta_dot(s.dim()), omega_dot(s.dim());
    reduced_rhs_core(s.beta(), s.omega(), s.zeta(), beta_dot, omega_dot);
    return {beta_dot, omega_dot};
}

ReducedState to_reduced(const PhaseState& s) {
    const SquareMatrix& a = s.A().mat();
    const SquareMatrix& ai = s.A().inv();
    const SquareMatrix at_adot = a.transpose() * s.Adot();
    const SquareMatrix adot_t_a = s.Adot().transpose() * a;
    return ReducedState(ai * ai.transpose(), at_adot + adot_t_a, at_adot - adot_t_a);
}

SquareMatrix jacobi_rhs(const JacobiState& s) {
    return jacobi_rhs_core(s.along().A().mat(), s.along().Adot(), s.J(), s.Jdot());
}

InvariantReport invariant_report(const PhaseState& s, const PhaseState& reference) {
    PhaseRefs ref{hs_inner(reference.Adot(), reference.Adot()),
                  phase_zeta(reference.A().mat(), reference.Adot()),
                  phase_angmom(reference.A().mat(), reference.Adot())};
    return phase_report(s.A(), s.Adot(), ref);
}

InvariantReport invariant_report(const ReducedState& s, const ReducedState& reference) {
    return reduced_report(s.beta(), s.omega(), s.zeta(), reference.zeta());
}

Trajectory integrate_geodesic(const PhaseState& init, double t_end, const IntegratorOptions& opts) {
    const int n = init.dim();
    const std::size_t nn = static_cast<std::size_t>(n) * n;

    std::vector<double> y0(2 * nn);
    copy_into(init.A().mat(), y0, 0);
    copy_into(init.Adot(), y0, nn);

    const PhaseRefs ref{hs_inner(init.Adot(), init.Adot()),
                        phase_zeta(init.A().mat(), init.Adot()),
                        phase_angmom(init.A().mat(), init.Adot())};

    OdeRhs rhs = [n, nn](double, const std::vector<double>& y, std::vector<double>& dydt) {
        const SquareMatrix a = slice(y, 0, n);
        const SquareMatrix adot = slice(y, nn, n);
        SquareMatrix acc(n);
        GeodesicCore::eval(a, adot, acc);
        std::copy(y.begin() + static_cast<std::ptrdiff_t>(nn), y.begin() + static_cast<std::ptrdiff_t>(2 * nn), dydt.begin());
        std::copy(acc.data().begin(), acc.data().end(), dydt.begin() + static_cast<std::ptrdiff_t>(nn));
    };

    Trajectory traj;
    std::vector<double> norm_sq, inv_norm;
    std::string sample_error;
    OdeSampleSink sink = [&](double t, const std::vector<double>& y) {
        if (!sample_error.empty()) return;
        try {
            GroupPoint a(slice(y, 0, n));
            PhaseState state(a, slice(y, nn, n));
            InvariantReport rep = phase_report(state.A(), state.Adot(), ref);
            norm_sq.push_back(hs_inner(state.A().mat(), state.A().mat()));
            inv_norm.push_back(hs_norm(state.A().inv()));
            traj.samples.push_back({t, StateVariant(std::move(state)), rep});
        } catch (const InvariantError& e) {
            sample_error = e.what();
        }
    };

    OdeOptions oo{opts.rel_tol, opts.abs_tol, opts.max_step, opts.max_steps};
    OdeStatus st = integrate_dopri5(rhs, std::move(y0), 0.0, t_end, opts.dt_out, oo,
                                    [n](std::vector<double>& y) { project_phase_flat(y, n); }, sink);
    traj.truncated = st.truncated || !sample_error.empty();
    traj.truncation_reason = !sample_error.empty() ? ("sample rejected: " + sample_error) : st.reason;
    fill_virial(traj, norm_sq, inv_norm, n);
    return traj;
}

Trajectory integrate_geodesic(const ReducedState& init, double t_end, const IntegratorOptions& opts) {
    const int n = init.dim();
    const std::size_t nn = static_cast<std::size_t>(n) * n;

    std::vector<double> y0(2 * nn);
    copy_into(init.beta(), y0, 0);
    copy_into(init.omega(), y0, nn);
    const SquareMatrix zeta = init.zeta();  // constant of motion, never stepped

    OdeRhs rhs = [n, nn, &zeta](double, const std::vector<double>& y, std::vector<double>& dydt) {
        SquareMatrix beta_dot(n), omega_dot(n);
        reduced_rhs_core(slice(y, 0, n), slice(y, nn, n), zeta, beta_dot, omega_dot);
        copy_into(beta_dot, dydt, 0);
        copy_into(omega_dot, dydt, nn);
    };

    Trajectory traj;
    std::vector<double> norm_sq, inv_norm;
    std::string sample_error;
    OdeSampleSink sink = [&](double t, const std::vector<double>& y) {
        if (!sample_error.empty()) return;
        try {
            ReducedState state(slice(y, 0, n), slice(y, nn, n), zeta);
            InvariantReport rep = reduced_report(state.beta(), state.omega(), state.zeta(), zeta);
            norm_sq.push_back(inverse(state.beta()).trace());  // |A|^2 = tr(beta^-1)
            inv_norm.push_back(std::sqrt(state.beta().trace()));
            traj.samples.push_back({t, StateVariant(std::move(state)), rep});
        } catch (const InvariantError& e) {
            sample_error = e.what();
        }
    };

    OdeOptions oo{opts.rel_tol, opts.abs_tol, opts.max_step, opts.max_steps};
    OdeStatus st = integrate_dopri5(rhs, std::move(y0), 0.0, t_end, opts.dt_out, oo,
                                    [n](std::vector<double>& y) { project_reduced_flat(y, n); }, sink);
    traj.truncated = st.truncated || !sample_error.empty();
    traj.truncation_reason = !sample_error.empty() ? ("sample rejected: " + sample_error) : st.reason;
    fill_virial(traj, norm_sq, inv_norm, n);
    return traj;
}

Trajectory integrate_jacobi(const JacobiState& init, double t_end, const IntegratorOptions& opts) {
    const int n = init.dim();
    const std::size_t nn = static_cast<std::size_t>(n) * n;

    std::vector<double> y0(4 * nn);
    copy_into(init.along().A().mat(), y0, 0);
    copy_into(init.along().Adot(), y0, nn);
    copy_into(init.J(), y0, 2 * nn);
    copy_into(init.Jdot(), y0, 3 * nn);

    const PhaseRefs ref{hs_inner(init.along().Adot(), init.along().Adot()),
                        phase_zeta(init.along().A().mat(), init.along().Adot()),
                        phase_angmom(init.along().A().mat(), init.along().Adot())};

    OdeRhs rhs = [n, nn](double, const std::vector<double>& y, std::vector<double>& dydt) {
        const SquareMatrix a = slice(y, 0, n);
        const SquareMatrix adot = slice(y, nn, n);
        const SquareMatrix j = slice(y, 2 * nn, n);
        const SquareMatrix jdot = slice(y, 3 * nn, n);
        SquareMatrix acc(n);
        GeodesicCore::eval(a, adot, acc);
        const SquareMatrix jacc = jacobi_rhs_core(a, adot, j, jdot);
        copy_into(adot, dydt, 0);
        copy_into(acc, dydt, nn);
        copy_into(jdot, dydt, 2 * nn);
        copy_into(jacc, dydt, 3 * nn);
    };

    Trajectory traj;
    std::vector<double> norm_sq, inv_norm;
    std::string sample_error;
    OdeSampleSink sink = [&](double t, const std::vector<double>& y) {
        if (!sample_error.empty()) return;
        try {
            GroupPoint a(slice(y, 0, n));
            PhaseState along(a, slice(y, nn, n));
            JacobiState state(along, slice(y, 2 * nn, n), slice(y, 3 * nn, n));
            InvariantReport rep = phase_report(along.A(), along.Adot(), ref);
            norm_sq.push_back(hs_inner(along.A().mat(), along.A().mat()));
            inv_norm.push_back(hs_norm(along.A().inv()));
            traj.samples.push_back({t, StateVariant(std::move(state)), rep});
        } catch (const InvariantError& e) {
            sample_error = e.what();
        }
    };

    OdeOptions oo{opts.rel_tol, opts.abs_tol, opts.max_step, opts.max_steps};
    OdeStatus st = integrate_dopri5(rhs, std::move(y0), 0.0, t_end, opts.dt_out, oo,
                                    [n](std::vector<double>& y) { project_jacobi_flat(y, n); }, sink);
    traj.truncated = st.truncated || !sample_error.empty();
    traj.truncation_reason = !sample_error.empty() ? ("sample rejected: " + sample_error) : st.reason;
    fill_virial(traj, norm_sq, inv_norm, n);
    return traj;
}

}  // namespace slngeo
