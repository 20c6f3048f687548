#include "slngeo/blockdiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "slngeo/linalg.hpp"
#include "slngeo/ode.hpp"

namespace slngeo {

namespace {

void require_lengths(const BlockState& s) {
    const auto m = static_cast<std::size_t>(s.m);
    if (s.m < 1 || s.b0.size() != m || s.b1.size() != m || s.b2.size() != m ||
        s.w0.size() != m || s.w1.size() != m || s.w2.size() != m || s.z.size() != m)
        throw std::invalid_argument("BlockState: component vectors must all have length m >= 1");
}

double det_beta(const BlockState& s) {
    double det = 1.0;
    for (int i = 0; i < s.m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        det *= s.b0[k] * s.b0[k] - s.b1[k] * s.b1[k] - s.b2[k] * s.b2[k];
    }
    if (s.parity == BlockParity::Odd) det *= s.b_inf;
    return det;
}

double compatibility_sum(const BlockState& s) {
    double sum = 0.0;
    for (int i = 0; i < s.m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        sum += s.b0[k] * s.w0[k] + s.b1[k] * s.w1[k] + s.b2[k] * s.w2[k];
    }
    if (s.parity == BlockParity::Odd) sum += 0.5 * s.b_inf * s.w_inf;
    return sum;
}

// Flat layout for the ODE drivers: [b0 b1 b2 w0 w1 w2 (b_inf w_inf)].
std::size_t flat_size(const BlockState& s) {
    return static_cast<std::size_t>(6 * s.m) + (s.parity == BlockParity::Odd ? 2 : 0);
}

std::vector<double> to_flat(const BlockState& s) {
    std::vector<double> y;
    y.reserve(flat_size(s));
    for (const auto* v : {&s.b0, &s.b1, &s.b2, &s.w0, &s.w1, &s.w2})
        y.insert(y.end(), v->begin(), v->end());
    if (s.parity == BlockParity::Odd) {
        y.push_back(s.b_inf);
        y.push_back(s.w_inf);
    }
    return y;
}

BlockState from_flat(const BlockState& like, const std::vector<double>& y) {
    BlockState s = like;  // copies m, parity, z
    const auto m = static_cast<std::size_t>(like.m);
    auto it = y.begin();
    for (auto* v : {&s.b0, &s.b1, &s.b2, &s.w0, &s.w1, &s.w2}) {
        v->assign(it, it + static_cast<std::ptrdiff_t>(m));
        it += static_cast<std::ptrdiff_t>(m);
    }
    if (like.parity == BlockParity::Odd) {
        s.b_inf = *it++;
        s.w_inf = *it++;
    }
    return s;
}

void block_rhs_flat(const BlockState& like, const std::vector<double>& y, std::vector<double>& dydt) {
    const int m = like.m;
    const auto mz = static_cast<std::size_t>(m);
    const bool odd = like.parity == BlockParity::Odd;
    const double* b0 = y.data();
    const double* b1 = b0 + mz;
    const double* b2 = b1 + mz;
    const double* w0 = b2 + mz;
    const double* w1 = w0 + mz;
    const double* w2 = w1 + mz;
    const double binf = odd ? y[6 * mz] : 0.0;
    const double winf = odd ? y[6 * mz + 1] : 0.0;

    // Global trace terms: tr(omega beta omega beta) = sum over blocks of
    // 2(p^2 + q^2 + r^2 - s^2) with (p,q,r,s) the I/K/S/Z components of
    // omega*beta, and tr(zeta beta zeta beta) = 2 z^2 (b1^2 + b2^2 - b0^2).
    double tr_wbwb = 0.0, tr_zbzb = 0.0, tr_b = 0.0;
    for (int i = 0; i < m; ++i) {
        const double zi = like.z[static_cast<std::size_t>(i)];
        const double p = w0[i] * b0[i] + w1[i] * b1[i] + w2[i] * b2[i];
        const double q = w0[i] * b1[i] + w1[i] * b0[i];
        const double r = w0[i] * b2[i] + w2[i] * b0[i];
        const double sz = w2[i] * b1[i] - w1[i] * b2[i];
        tr_wbwb += 2.0 * (p * p + q * q + r * r - sz * sz);
        tr_zbzb += 2.0 * zi * zi * (b1[i] * b1[i] + b2[i] * b2[i] - b0[i] * b0[i]);
        tr_b += 2.0 * b0[i];
    }
    if (odd) {
        tr_wbwb += winf * winf * binf * binf;
        tr_b += binf;
    }
    const double trace_shift = 0.5 * (tr_wbwb + tr_zbzb) / tr_b;

    double* db0 = dydt.data();
    double* db1 = db0 + mz;
    double* db2 = db1 + mz;
    double* dw0 = db2 + mz;
    double* dw1 = dw0 + mz;
    double* dw2 = dw1 + mz;

    for (int i = 0; i < m; ++i) {
        const double zi = like.z[static_cast<std::size_t>(i)];
        const double bb = b0[i] * b0[i], b11 = b1[i] * b1[i], b22 = b2[i] * b2[i];
        // beta' = -beta omega beta, componentwise on {I,K,S}.
        db0[i] = -(w0[i] * (bb + b11 + b22) + 2.0 * w1[i] * b1[i] * b0[i] + 2.0 * w2[i] * b2[i] * b0[i]);
        db1[i] = -(2.0 * w0[i] * b1[i] * b0[i] + w1[i] * (bb + b11 - b22) + 2.0 * w2[i] * b2[i] * b1[i]);
        db2[i] = -(2.0 * w0[i] * b0[i] * b2[i] + w2[i] * (bb - b11 + b22) + 2.0 * w1[i] * b1[i] * b2[i]);

        // omega' = 1/2 (omega beta omega + zeta^T beta zeta
        //             + zeta^T beta omega + omega beta zeta) + trace_shift I.
        const double ww = w0[i] * w0[i], w11 = w1[i] * w1[i], w22 = w2[i] * w2[i];
        const double obo_I = b0[i] * (ww + w11 + w22) + 2.0 * w1[i] * b1[i] * w0[i] + 2.0 * w2[i] * b2[i] * w0[i];
        const double obo_K = 2.0 * w0[i] * w1[i] * b0[i] + b1[i] * (ww + w11 - w22) + 2.0 * w2[i] * b2[i] * w1[i];
        const double obo_S = 2.0 * w0[i] * b0[i] * w2[i] + b2[i] * (ww - w11 + w22) + 2.0 * w1[i] * b1[i] * w2[i];
        const double zbz_I = b0[i] * zi * zi;
        const double zbz_K = -b1[i] * zi * zi;
        const double zbz_S = -b2[i] * zi * zi;
        const double cross_I = 2.0 * zi * (w1[i] * b2[i] - w2[i] * b1[i]);
        const double cross_K = 2.0 * zi * (w0[i] * b2[i] + w2[i] * b0[i]);
        const double cross_S = -2.0 * zi * (w0[i] * b1[i] + w1[i] * b0[i]);

        dw0[i] = 0.5 * (obo_I + zbz_I + cross_I) + trace_shift;
        dw1[i] = 0.5 * (obo_K + zbz_K + cross_K);
        dw2[i] = 0.5 * (obo_S + zbz_S + cross_S);
    }
    if (odd) {
        dydt[6 * mz] = -winf * binf * binf;
        dydt[6 * mz + 1] = 0.5 * winf * winf * binf + trace_shift;
    }
}

// det rescale on the beta components plus the omega trace-part correction,
// the block-coordinate mirror of the reduced-state projection.
void project_block_flat(const BlockState& like, std::vector<double>& y) {
    const int m = like.m;
    const auto mz = static_cast<std::size_t>(m);
    const bool odd = like.parity == BlockParity::Odd;
    const int n = like.dim();

    double det = 1.0;
    for (int i = 0; i < m; ++i)
        det *= y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)] -
               y[mz + static_cast<std::size_t>(i)] * y[mz + static_cast<std::size_t>(i)] -
               y[2 * mz + static_cast<std::size_t>(i)] * y[2 * mz + static_cast<std::size_t>(i)];
    if (odd) det *= y[6 * mz];
    if (det > 0.0) {
        const double scale = std::pow(det, -1.0 / n);
        for (std::size_t k = 0; k < 3 * mz; ++k) y[k] *= scale;
        if (odd) y[6 * mz] *= scale;
    }

    double compat = 0.0, tr_b = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        compat += y[k] * y[3 * mz + k] + y[mz + k] * y[4 * mz + k] + y[2 * mz + k] * y[5 * mz + k];
        tr_b += 2.0 * y[k];
    }
    if (odd) {
        compat += 0.5 * y[6 * mz] * y[6 * mz + 1];
        tr_b += y[6 * mz];
    }
    // tr(beta omega) = 2 * compat (+ b_inf w_inf counted once); shift the
    // omega trace part: w0_i -= c, w_inf -= c with c = tr(beta omega)/tr(beta).
    const double tr_bw = 2.0 * compat;
    const double c = tr_bw / tr_b;
    for (std::size_t k = 0; k < mz; ++k) y[3 * mz + k] -= c;
    if (odd) y[6 * mz + 1] -= c;
}

}  // namespace

void BlockState::validate() const {
    require_lengths(*this);
    for (int i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!(b0[k] > std::sqrt(b1[k] * b1[k] + b2[k] * b2[k])))
            throw InvariantError("BlockState: block " + std::to_string(i + 1) +
                                 " is not positive definite (b0 <= sqrt(b1^2+b2^2))");
    }
    if (parity == BlockParity::Odd && !(b_inf > 0.0))
        throw InvariantError("BlockState: b_inf must be positive");
    const double det = det_beta(*this);
    if (std::abs(det - 1.0) > 1e-9)
        throw InvariantError("BlockState: det(beta) = " + std::to_string(det) + " is not 1");
    const double compat = compatibility_sum(*this);
    double compat_scale = 1.0;
    for (int i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        compat_scale += std::abs(b0[k] * w0[k]) + std::abs(b1[k] * w1[k]) + std::abs(b2[k] * w2[k]);
    }
    if (parity == BlockParity::Odd) compat_scale += 0.5 * std::abs(b_inf * w_inf);
    if (std::abs(compat) > 1e-9 * compat_scale)
        throw InvariantError("BlockState: compatibility sum " + std::to_string(compat) +
                             " is not 0");
}

ReducedState embed(const BlockState& s) {
    s.validate();
    const int n = s.dim();
    SquareMatrix beta(n), omega(n), zeta(n);
    for (int i = 0; i < s.m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const int r = 2 * i;
        beta(r, r) = s.b0[k] + s.b1[k];
        beta(r + 1, r + 1) = s.b0[k] - s.b1[k];
        beta(r, r + 1) = s.b2[k];
        beta(r + 1, r) = s.b2[k];
        omega(r, r) = s.w0[k] + s.w1[k];
        omega(r + 1, r + 1) = s.w0[k] - s.w1[k];
        omega(r, r + 1) = s.w2[k];
        omega(r + 1, r) = s.w2[k];
        zeta(r, r + 1) = -s.z[k];
        zeta(r + 1, r) = s.z[k];
    }
    if (s.parity == BlockParity::Odd) {
        beta(n - 1, n - 1) = s.b_inf;
        omega(n - 1, n - 1) = s.w_inf;
    }
    return ReducedState(std::move(beta), std::move(omega), std::move(zeta));
}

BlockState extract(const ReducedState& s, BlockParity parity) {
    const int n = s.dim();
    const int m = parity == BlockParity::Even ? n / 2 : (n - 1) / 2;
    if ((parity == BlockParity::Even && n % 2 != 0) || (parity == BlockParity::Odd && n % 2 != 1))
        throw std::invalid_argument("extract: dimension does not match the requested parity");

    BlockState out;
    out.m = m;
    out.parity = parity;
    for (auto* v : {&out.b0, &out.b1, &out.b2, &out.w0, &out.w1, &out.w2, &out.z})
        v->resize(static_cast<std::size_t>(m));
    const SquareMatrix& beta = s.beta();
    const SquareMatrix& omega = s.omega();
    const SquareMatrix& zeta = s.zeta();
    for (int i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const int r = 2 * i;
        out.b0[k] = 0.5 * (beta(r, r) + beta(r + 1, r + 1));
        out.b1[k] = 0.5 * (beta(r, r) - beta(r + 1, r + 1));
        out.b2[k] = beta(r, r + 1);
        out.w0[k] = 0.5 * (omega(r, r) + omega(r + 1, r + 1));
        out.w1[k] = 0.5 * (omega(r, r) - omega(r + 1, r + 1));
        out.w2[k] = omega(r, r + 1);
        out.z[k] = zeta(r + 1, r);
    }
    if (parity == BlockParity::Odd) {
        out.b_inf = beta(n - 1, n - 1);
        out.w_inf = omega(n - 1, n - 1);
    }
    return out;
}

BlockDerivative block_rhs(const BlockState& s) {
    require_lengths(s);
    std::vector<double> y = to_flat(s);
    std::vector<double> dydt(y.size());
    block_rhs_flat(s, y, dydt);
    BlockState d = from_flat(s, dydt);
    return BlockDerivative{std::move(d.b0), std::move(d.b1), std::move(d.b2),
                           std::move(d.w0), std::move(d.w1), std::move(d.w2),
                           d.b_inf, d.w_inf};
}

double block_energy(const BlockState& s) {
    require_lengths(s);
    double e = 0.0;
    for (int i = 0; i < s.m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        e += s.b0[k] * (s.w0[k] * s.w0[k] + s.w1[k] * s.w1[k] + s.w2[k] * s.w2[k] + s.z[k] * s.z[k]);
        e += 2.0 * s.w0[k] * s.w1[k] * s.b1[k] - 2.0 * s.w2[k] * s.b1[k] * s.z[k];
        e += 2.0 * s.w0[k] * s.w2[k] * s.b2[k] + 2.0 * s.w1[k] * s.b2[k] * s.z[k];
    }
    if (s.parity == BlockParity::Odd) e += 0.5 * s.b_inf * s.w_inf * s.w_inf;
    return e;
}

BoundednessReport boundedness_verdict(const BlockState& s) {
    require_lengths(s);
    BoundednessReport report;
    report.energy = block_energy(s);

    bool pure_diagonal = true;
    for (int i = 0; i < s.m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (s.b1[k] != 0.0 || s.b2[k] != 0.0 || s.w1[k] != 0.0 || s.w2[k] != 0.0)
            pure_diagonal = false;
        if (s.z[k] != 0.0) {
            report.ceilings.emplace_back(report.energy / (s.z[k] * s.z[k]));
        } else {
            report.ceilings.emplace_back(std::nullopt);
            report.zero_momentum_blocks.push_back(i + 1);
        }
    }
    const bool all_nonzero = report.zero_momentum_blocks.empty();
    report.verdict = (s.parity == BlockParity::Even && pure_diagonal && all_nonzero)
                         ? BoundednessVerdict::Bounded
                         : BoundednessVerdict::Inconclusive;
    return report;
}

BlockTrajectory integrate_block(const BlockState& init, double t_end, const IntegratorOptions& opts) {
    init.validate();
    BlockTrajectory traj;
    const BlockState like = init;

    OdeRhs rhs = [&like](double, const std::vector<double>& y, std::vector<double>& dydt) {
        block_rhs_flat(like, y, dydt);
    };
    OdeProjection project = [&like](std::vector<double>& y) { project_block_flat(like, y); };
    OdeSampleSink sink = [&](double t, const std::vector<double>& y) {
        BlockState s = from_flat(like, y);
        traj.energy.push_back(block_energy(s));
        traj.t.push_back(t);
        traj.states.push_back(std::move(s));
    };

    OdeOptions oo{opts.rel_tol, opts.abs_tol, opts.max_step, opts.max_steps};
    OdeStatus st = integrate_dopri5(rhs, to_flat(init), 0.0, t_end, opts.dt_out, oo, project, sink);
    traj.truncated = st.truncated;
    traj.truncation_reason = st.reason;
    return traj;
}

// ---------------------------------------------------------------------------
// Pulsating reduction

PulseSystem::PulseSystem(int m0, int m, double z1, double zm) : m0_(m0), m_(m), z1_(z1), zm_(zm) {
    if (!(m0 >= 1 && m0 < m))
        throw std::invalid_argument("PulseSystem: need 1 <= m0 < m");
    if (z1 == 0.0 || zm == 0.0)
        throw std::invalid_argument("PulseSystem: both group momenta must be nonzero");
}

double PulseSystem::hamiltonian(double lam, double v) const {
    const double g1 = std::exp(lam / m0_);
    const double g2 = std::exp(-lam / (m_ - m0_));
    return m0_ * g1 * z1_ * z1_ + (m_ - m0_) * g2 * zm_ * zm_ +
           (std::exp(-lam / m0_) / m0_ + std::exp(lam / (m_ - m0_)) / (m_ - m0_)) * v * v;
}

Hamiltonian2DState PulseSystem::rhs(const Hamiltonian2DState& s) const {
    const double lam = s.q, v = s.p;
    const int m1 = m_ - m0_;
    const double g1 = std::exp(lam / m0_);
    const double g2 = std::exp(-lam / m1);
    const double tr_wbwb = 2.0 * v * v * (1.0 / m0_ + 1.0 / m1);
    const double tr_zbzb = -2.0 * (m0_ * z1_ * z1_ * g1 * g1 + m1 * zm_ * zm_ * g2 * g2);
    const double tr_b = 2.0 * (m0_ * g1 + m1 * g2);
    const double shift = 0.5 * (tr_wbwb + tr_zbzb) / tr_b;
    const double vdot = -v * v / (2.0 * m0_) + 0.5 * m0_ * z1_ * z1_ * g1 * g1 + m0_ * g1 * shift;
    return {-v, vdot};
}

double PulseSystem::critical_lambda() const {
    // e^{lam/m0} z1^2 = e^{-lam/(m-m0)} zm^2.
    const double inv = 1.0 / m0_ + 1.0 / (m_ - m0_);
    return std::log(zm_ * zm_ / (z1_ * z1_)) / inv;
}

namespace {

std::vector<std::pair<double, Hamiltonian2DState>> integrate_2d(
    const std::function<Hamiltonian2DState(const Hamiltonian2DState&)>& sys_rhs,
    const Hamiltonian2DState& init, double t_end, double dt_out, const IntegratorOptions& opts) {
    std::vector<std::pair<double, Hamiltonian2DState>> out;
    OdeRhs rhs = [&sys_rhs](double, const std::vector<double>& y, std::vector<double>& dydt) {
        const Hamiltonian2DState d = sys_rhs({y[0], y[1]});
        dydt[0] = d.q;
        dydt[1] = d.p;
    };
    OdeSampleSink sink = [&out](double t, const std::vector<double>& y) {
        out.push_back({t, {y[0], y[1]}});
    };
    OdeOptions oo{opts.rel_tol, opts.abs_tol, opts.max_step, opts.max_steps};
    integrate_dopri5(rhs, {init.q, init.p}, 0.0, t_end, dt_out, oo, nullptr, sink);
    return out;
}

Hamiltonian2DState evolve_2d(const std::function<Hamiltonian2DState(const Hamiltonian2DState&)>& sys_rhs,
                             const Hamiltonian2DState& from, double dt, const IntegratorOptions& opts) {
    Hamiltonian2DState result = from;
    OdeRhs rhs = [&sys_rhs](double, const std::vector<double>& y, std::vector<double>& dydt) {
        const Hamiltonian2DState d = sys_rhs({y[0], y[1]});
        dydt[0] = d.q;
        dydt[1] = d.p;
    };
    OdeSampleSink sink = [&result](double, const std::vector<double>& y) { result = {y[0], y[1]}; };
    OdeOptions oo{opts.rel_tol, opts.abs_tol, opts.max_step, opts.max_steps};
    integrate_dopri5(rhs, {from.q, from.p}, 0.0, dt, 0.0, oo, nullptr, sink);
    return result;
}

}  // namespace

std::vector<std::pair<double, Hamiltonian2DState>> PulseSystem::integrate(
    const Hamiltonian2DState& init, double t_end, double dt_out, const IntegratorOptions& opts) const {
    return integrate_2d([this](const Hamiltonian2DState& s) { return rhs(s); }, init, t_end, dt_out,
                        opts);
}

std::optional<double> PulseSystem::detect_period(const Hamiltonian2DState& init, double t_max) const {
    const IntegratorOptions opts;
    const double dt = 0.01;
    const auto samples = integrate(init, t_max, dt, opts);
    const auto sys_rhs = [this](const Hamiltonian2DState& s) { return rhs(s); };

    // Times where v crosses the section v = 0, refined by bisecting short
    // re-integrations from the bracketing sample; a full period separates
    // consecutive same-direction crossings.
    std::vector<double> roots;
    for (std::size_t k = 1; k < samples.size() && roots.size() < 3; ++k) {
        const double v0 = samples[k - 1].second.p;
        const double v1 = samples[k].second.p;
        if (!((v0 < 0.0 && v1 >= 0.0) || (v0 > 0.0 && v1 <= 0.0))) continue;
        double lo = 0.0, hi = samples[k].first - samples[k - 1].first;
        const Hamiltonian2DState& base = samples[k - 1].second;
        for (int it = 0; it < 60 && (hi - lo) > 1e-10; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double vm = evolve_2d(sys_rhs, base, mid, opts).p;
            if ((v0 > 0.0) == (vm > 0.0)) lo = mid; else hi = mid;
        }
        roots.push_back(samples[k - 1].first + 0.5 * (lo + hi));
    }

    // Starting on the section: the turning points fall at T/2 and T.
    // Starting off it: three crossings bracket exactly one full period.
    const bool starts_on_section = std::abs(init.p) <= 1e-12 * std::max(1.0, std::abs(init.q));
    if (starts_on_section && roots.size() >= 2) return roots[1];
    if (!starts_on_section && roots.size() >= 3) return roots[2] - roots[0];
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Swirling/shear reduction

SwirlSystem::SwirlSystem(int n, int m0, double z0) : n_(n), m0_(m0), z0_(z0) {
    if (!(m0 >= 1 && 2 * m0 < n))
        throw std::invalid_argument("SwirlSystem: need 1 <= 2 m0 < n");
}

double SwirlSystem::hamiltonian(double b, double v) const {
    return m0_ * z0_ * z0_ * std::exp(b / (2.0 * m0_)) +
           (std::exp(-b / (2.0 * m0_)) / (4.0 * m0_) +
            std::exp(b / (n_ - 2.0 * m0_)) / (2.0 * n_ - 4.0 * m0_)) * v * v;
}

Hamiltonian2DState SwirlSystem::rhs(const Hamiltonian2DState& s) const {
    const double b = s.q, v = s.p;
    const int trail = n_ - 2 * m0_;
    const double g1 = std::exp(b / (2.0 * m0_));
    const double g2 = std::exp(-b / trail);
    const double tr_wbwb = v * v * (1.0 / (2.0 * m0_) + 1.0 / trail);
    const double tr_zbzb = -2.0 * m0_ * z0_ * z0_ * g1 * g1;
    const double tr_b = 2.0 * m0_ * g1 + trail * g2;
    const double shift = 0.5 * (tr_wbwb + tr_zbzb) / tr_b;
    const double vdot = -v * v / (4.0 * m0_) + m0_ * z0_ * z0_ * g1 * g1 + 2.0 * m0_ * g1 * shift;
    return {-v, vdot};
}

BlockState SwirlSystem::block_state(double b, double v) const {
    const int trail = n_ - 2 * m0_;
    const double lead_beta = std::exp(b / (2.0 * m0_));
    const double trail_beta = std::exp(-b / trail);
    const double lead_w = v / (2.0 * m0_) * std::exp(-b / (2.0 * m0_));
    const double trail_w = -v / trail * std::exp(b / trail);

    BlockState s;
    s.parity = (n_ % 2 == 0) ? BlockParity::Even : BlockParity::Odd;
    s.m = (n_ % 2 == 0) ? n_ / 2 : (n_ - 1) / 2;
    for (auto* vec : {&s.b0, &s.b1, &s.b2, &s.w0, &s.w1, &s.w2, &s.z})
        vec->assign(static_cast<std::size_t>(s.m), 0.0);
    for (int i = 0; i < s.m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const bool leading = i < m0_;
        s.b0[k] = leading ? lead_beta : trail_beta;
        s.w0[k] = leading ? lead_w : trail_w;
        s.z[k] = leading ? z0_ : 0.0;
    }
    if (s.parity == BlockParity::Odd) {
        s.b_inf = trail_beta;
        s.w_inf = trail_w;
    }
    return s;
}

std::vector<std::pair<double, Hamiltonian2DState>> SwirlSystem::integrate(
    const Hamiltonian2DState& init, double t_end, double dt_out, const IntegratorOptions& opts) const {
    return integrate_2d([this](const Hamiltonian2DState& s) { return rhs(s); }, init, t_end, dt_out,
                        opts);
}

SwirlSystem::Asymptotics SwirlSystem::analyze(const Hamiltonian2DState& init, double t_end,
                                              const IntegratorOptions& opts) const {
    Asymptotics out;
    out.energy = hamiltonian(init.q, init.p);
    const auto samples = integrate(init, t_end, 0.01, opts);
    if (samples.empty()) return out;

    out.b_min = out.b_max = samples.front().second.q;
    bool monotone = true;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        const double prev = samples[k - 1].second.q;
        const double cur = samples[k].second.q;
        out.b_min = std::min(out.b_min, cur);
        out.b_max = std::max(out.b_max, cur);
        if ((cur - prev) * (samples[1].second.q - samples[0].second.q) <= 0.0) monotone = false;
    }
    out.monotone = monotone;

    if (z0_ != 0.0) {
        out.predicted_slope = 0.5 * std::sqrt(out.energy / m0_);
        // Least squares B(t) ~ slope t + intercept over the last 20%.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t count = 0;
        for (const auto& [t, s] : samples) {
            if (t < 0.8 * t_end) continue;
            const double bt = std::exp(-s.q / (4.0 * m0_));
            sx += t; sy += bt; sxx += t * t; sxy += t * bt;
            ++count;
        }
        if (count > 1) {
            const double denom = count * sxx - sx * sx;
            out.fitted_slope = (count * sxy - sx * sy) / denom;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::optional<PulseAnsatz> match_pulse_ansatz(const BlockState& s, double tol) {
    require_lengths(s);
    if (s.parity != BlockParity::Even || s.m < 2) return std::nullopt;
    for (int i = 0; i < s.m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (std::abs(s.b1[k]) > tol || std::abs(s.b2[k]) > tol || std::abs(s.w1[k]) > tol ||
            std::abs(s.w2[k]) > tol)
            return std::nullopt;
        if (s.z[k] == 0.0) return std::nullopt;
    }
    // Two contiguous groups, constant (b0, w0, |z|) inside each.
    const auto same = [tol](double a, double b) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); };
    int m0 = 1;
    while (m0 < s.m && same(s.b0[static_cast<std::size_t>(m0)], s.b0[0]) &&
           same(s.w0[static_cast<std::size_t>(m0)], s.w0[0]) &&
           same(std::abs(s.z[static_cast<std::size_t>(m0)]), std::abs(s.z[0])))
        ++m0;
    if (m0 == s.m) return std::nullopt;  // a single group; nothing to pulse against
    for (int i = m0; i < s.m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const auto k0 = static_cast<std::size_t>(m0);
        if (!same(s.b0[k], s.b0[k0]) || !same(s.w0[k], s.w0[k0]) ||
            !same(std::abs(s.z[k]), std::abs(s.z[k0])))
            return std::nullopt;
    }
    PulseAnsatz ansatz;
    ansatz.m0 = m0;
    ansatz.z1 = std::abs(s.z[0]);
    ansatz.zm = std::abs(s.z[static_cast<std::size_t>(m0)]);
    ansatz.state.q = m0 * std::log(s.b0[0]);
    ansatz.state.p = m0 * s.b0[0] * s.w0[0];
    return ansatz;
}

InstabilityReport instability_demo(int n, int m0, double eps, double t_end,
                                   const IntegratorOptions& opts) {
    if (n % 2 != 0) throw std::invalid_argument("instability_demo: n must be even");
    if (!(2 * m0 < n)) throw std::invalid_argument("instability_demo: need 2 m0 < n");
    if (eps < 0.0) throw std::invalid_argument("instability_demo: eps must be >= 0");

    InstabilityReport report;
    report.eps = eps;

    const SwirlSystem swirl(n, m0, 1.0);
    const BlockState base = swirl.block_state(0.0, 0.0);

    const auto norm_a = [](const BlockState& s) {
        double sum = 0.0;
        for (int i = 0; i < s.m; ++i) {
            const auto k = static_cast<std::size_t>(i);
            // tr beta^-1 over a pure-diagonal block is 2 / b0.
            sum += 2.0 / s.b0[k];
        }
        if (s.parity == BlockParity::Odd) sum += 1.0 / s.b_inf;
        return std::sqrt(sum);
    };

    const BlockTrajectory unperturbed = integrate_block(base, t_end, opts);
    report.unperturbed_growth = norm_a(unperturbed.states.back()) / norm_a(unperturbed.states.front());

    BlockState perturbed = base;
    for (auto& zi : perturbed.z)
        if (std::abs(zi) < eps) zi = eps;
    report.perturbed_verdict = boundedness_verdict(perturbed);

    const BlockTrajectory run = integrate_block(perturbed, t_end, opts);
    const double energy = report.perturbed_verdict.energy;
    double max_excess = -std::numeric_limits<double>::infinity();
    for (const auto& s : run.states) {
        for (int i = 0; i < s.m; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double zi = s.z[k];
            if (zi == 0.0) continue;
            const double small_eig = s.b0[k] - std::sqrt(s.b1[k] * s.b1[k] + s.b2[k] * s.b2[k]);
            max_excess = std::max(max_excess, zi * zi * small_eig - energy);
        }
    }
    report.max_ceiling_excess = max_excess;
    report.perturbed_within_ceilings = max_excess <= 1e-8;
    return report;
}

BlockState figure_preset(int id) {
    BlockState s;
    s.m = 3;
    s.parity = BlockParity::Even;
    for (auto* v : {&s.b0, &s.b1, &s.b2, &s.w0, &s.w1, &s.w2, &s.z}) v->assign(3, 0.0);

    switch (id) {
        case 1:
            s.b0 = {std::pow(0.9, -2), std::pow(0.9, -2), 0.0};
            s.b0[2] = 1.0 / (s.b0[0] * s.b0[1]);
            s.z = {0.5 / s.b0[0], 0.5 / s.b0[1], 0.3 / s.b0[2]};
            s.w0 = {0.0, 0.0, 0.0};
            break;
        case 2:
            s.b0 = {1.0, 1.0, 1.0};
            s.z = {1.0, 0.5, 0.1};
            s.w0 = {3.0, 0.0, 0.0};
            break;
        case 3:
            s.b0 = {0.25, 4.0, 0.0};
            s.b0[2] = 1.0 / (s.b0[0] * s.b0[1]);
            s.z = {0.0, 0.5 / s.b0[1], 0.6 / s.b0[2]};
            s.w0 = {1.0 / s.b0[0], 0.0, 0.0};
            break;
        default:
            throw std::invalid_argument("figure_preset: id must be 1, 2 or 3");
    }
    // The captions leave the last mean-velocity component free; the
    // compatibility constraint fixes it.
    s.w0[2] = -(s.b0[0] * s.w0[0] + s.b0[1] * s.w0[1]) / s.b0[2];
    s.validate();
    return s;
}

}  // namespace slngeo
