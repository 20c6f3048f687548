#include "slngeo/families.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "slngeo/geometry.hpp"
#include "slngeo/linalg.hpp"

namespace slngeo {

LinearGeodesicSpec::LinearGeodesicSpec(GroupPoint b, SquareMatrix m)
    : b_(std::move(b)), m_(std::move(m)), bm_(b_.mat() * m_), index_(0) {
    require_same_dim(b_.mat(), m_, "LinearGeodesicSpec");
    const auto idx = nilpotency_index(m_);
    if (!idx)
        throw std::invalid_argument("LinearGeodesicSpec: M is not nilpotent");
    index_ = *idx;
    for (double t : {-10.0, 1.0, 10.0}) {
        const double det = determinant(at(t));
        if (std::abs(det - 1.0) > 1e-10)
            throw InvariantError("LinearGeodesicSpec: |det A(t) - 1| = " +
                                 std::to_string(std::abs(det - 1.0)) + " at t = " + std::to_string(t));
    }
}

SquareMatrix LinearGeodesicSpec::at(double t) const { return b_.mat() + t * bm_; }

PhaseState LinearGeodesicSpec::phase_state(double t) const {
    return PhaseState(GroupPoint(at(t)), bm_);
}

bool classify_line(const SquareMatrix& a0, const SquareMatrix& a1, double tol) {
    require_same_dim(a0, a1, "classify_line");
    const double det = determinant(a0);
    if (std::abs(det - 1.0) > tol) return false;
    const SquareMatrix m = inverse(a0) * a1;
    return nilpotency_index(m, tol).has_value();
}

ExponentialVerdict classify_exponential(const SquareMatrix& b, const SquareMatrix& c, double tol) {
    require_same_dim(b, c, "classify_exponential");
    const double cscale = std::max(1.0, hs_norm(c));
    if (std::abs(c.trace()) > 1e-10 * cscale)
        throw std::invalid_argument("classify_exponential: tr C != 0 (C is not traceless)");
    GroupPoint base(b);  // validates unit determinant

    const SquareMatrix c2 = c * c;
    if (hs_norm(c2) <= tol * cscale * cscale)
        return {ExponentialClass::LinearNilpotent, 0.0};

    const int n = b.dim();
    if (n % 2 == 0 && is_antisymmetric(c, tol * cscale)) {
        const SquareMatrix gram_inv = base.inv() * base.inv().transpose();  // (B^T B)^-1
        const double kappa = trace_product(c, c) / gram_inv.trace();
        const SquareMatrix residual = c2 - kappa * gram_inv;
        const double scale = std::max(hs_norm(c2), std::abs(kappa) * hs_norm(gram_inv));
        if (hs_norm(residual) <= tol * scale) return {ExponentialClass::Rotational, kappa};
    }
    return {ExponentialClass::NotGeodesic, 0.0};
}

std::pair<GroupPoint, SquareMatrix> build_rotational(const RotationalSpec& spec) {
    const int m = static_cast<int>(spec.lambdas.size());
    if (m < 1) throw std::invalid_argument("build_rotational: need at least one plane");
    if (static_cast<int>(spec.signs.size()) != m)
        throw std::invalid_argument("build_rotational: signs and lambdas must have equal length");
    if (!(spec.kappa < 0.0))
        throw std::invalid_argument("build_rotational: kappa must be negative");
    double det_sq = 1.0;
    for (double l : spec.lambdas) {
        if (!(l > 0.0)) throw std::invalid_argument("build_rotational: lambdas must be positive");
        det_sq *= l * l;
    }
    if (std::abs(det_sq - 1.0) > 1e-10)
        throw std::invalid_argument("build_rotational: product of lambda_i^2 must be 1");

    const int n = 2 * m;
    SquareMatrix lam(n);
    SquareMatrix c0(n);
    const double root_kappa = std::sqrt(-spec.kappa);
    for (int i = 0; i < m; ++i) {
        const double l = spec.lambdas[static_cast<std::size_t>(i)];
        lam(2 * i, 2 * i) = l;
        lam(2 * i + 1, 2 * i + 1) = l;
        const double w = spec.signs[static_cast<std::size_t>(i)] >= 0 ? root_kappa / l : -root_kappa / l;
        c0(2 * i, 2 * i + 1) = -w;
        c0(2 * i + 1, 2 * i) = w;
    }

    SquareMatrix b = lam;
    SquareMatrix c = c0;
    if (spec.conjugators) {
        const SquareMatrix& u = spec.conjugators->first;
        const SquareMatrix& v = spec.conjugators->second;
        if (!is_special_orthogonal(u, 1e-10) || !is_special_orthogonal(v, 1e-10))
            throw std::invalid_argument("build_rotational: conjugators must be special orthogonal");
        b = u * lam * v;
        c = v.transpose() * c0 * v;
    }

    GroupPoint base(b);
    const auto verdict = classify_exponential(b, c);
    if (verdict.kind != ExponentialClass::Rotational)
        throw InvariantError("build_rotational: assembled pair failed the rotational condition");
    return {std::move(base), std::move(c)};
}

SquareMatrix left_right_transport(const GroupPoint& b, const SquareMatrix& c) {
    const auto verdict = classify_exponential(b.mat(), c);
    if (verdict.kind != ExponentialClass::Rotational)
        throw std::invalid_argument("left_right_transport: (B, C) is not a rotational pair");

    const SquareMatrix cprime = b.mat() * c * b.inv();
    const double scale = std::max(1.0, hs_norm(cprime));
    if (!is_antisymmetric(cprime, 1e-10 * scale))
        throw InvariantError("left_right_transport: B C B^-1 is not antisymmetric");
    for (double t : {0.1, 1.0}) {
        const SquareMatrix lhs = matrix_exp(t * cprime) * b.mat();
        const SquareMatrix rhs = b.mat() * matrix_exp(t * c);
        if (hs_norm(lhs - rhs) > 1e-10 * std::max(1.0, hs_norm(rhs)))
            throw InvariantError("left_right_transport: exp(tC')B != B exp(tC)");
    }
    return cprime;
}

PerpBasis perp_basis(const GroupPoint& b, const SquareMatrix& m) {
    require_same_dim(b.mat(), m, "perp_basis");
    const auto idx = nilpotency_index(m);
    if (!idx) throw std::invalid_argument("perp_basis: M is not nilpotent");
    const int n = m.dim();
    const int codim = *idx;

    // Orthonormalize the spanning set B^-T (M^T)^k, k = 0..index-1.
    std::vector<SquareMatrix> q;
    const SquareMatrix bt = b.inv().transpose();
    SquareMatrix mt_pow = SquareMatrix::identity(n);
    const SquareMatrix mt = m.transpose();
    for (int k = 0; k < codim; ++k) {
        SquareMatrix v = bt * mt_pow;
        for (const auto& e : q) v -= hs_inner(v, e) * e;
        const double norm = hs_norm(v);
        if (norm <= 1e-12)
            throw InvariantError("perp_basis: powers of the nilpotent are not independent");
        q.push_back(v / norm);
        mt_pow = mt_pow * mt;
    }

    // Extend to an orthonormal basis of matrix space; the extension is the
    // perp subspace.
    PerpBasis result{b, m, {}};
    result.basis.reserve(static_cast<std::size_t>(n) * n - static_cast<std::size_t>(codim));
    for (int i = 0; i < n && static_cast<int>(result.basis.size()) < n * n - codim; ++i) {
        for (int j = 0; j < n && static_cast<int>(result.basis.size()) < n * n - codim; ++j) {
            SquareMatrix v(n);
            v(i, j) = 1.0;
            for (const auto& e : q) v -= hs_inner(v, e) * e;
            for (const auto& e : result.basis) v -= hs_inner(v, e) * e;
            const double norm = hs_norm(v);
            if (norm > 1e-8) result.basis.push_back(v / norm);
        }
    }
    if (static_cast<int>(result.basis.size()) != n * n - codim)
        throw InvariantError("perp_basis: failed to complete the orthogonal complement");
    return result;
}

JacobiClosedForm::JacobiClosedForm(SquareMatrix m, double b0, double b1, SquareMatrix k0,
                                   SquareMatrix k1)
    : m_transpose_(m.transpose()), k0_(std::move(k0)), k1_(std::move(k1)), b0_(b0), b1_(b1),
      norm_m_(hs_norm(m)), n_(m.dim()) {
    require_same_dim(m, k0_, "JacobiClosedForm");
    require_same_dim(m, k1_, "JacobiClosedForm");
    const SquareMatrix m2 = m * m;
    if (hs_norm(m2) > 1e-12 * std::max(1.0, norm_m_ * norm_m_))
        throw std::invalid_argument("JacobiClosedForm: M^2 != 0");
    // K0, K1 must lie in the perp subspace of (I, M): orthogonal to I and M^T.
    const SquareMatrix eye = SquareMatrix::identity(n_);
    for (const SquareMatrix* k : {&k0_, &k1_}) {
        const double scale = std::max(1.0, hs_norm(*k));
        if (std::abs(hs_inner(*k, eye)) > 1e-9 * scale * std::sqrt(static_cast<double>(n_)) ||
            (norm_m_ > 0.0 && std::abs(hs_inner(*k, m_transpose_)) > 1e-9 * scale * norm_m_))
            throw std::invalid_argument("JacobiClosedForm: K0/K1 must lie in the perp subspace");
    }
}

SquareMatrix JacobiClosedForm::operator()(double t) const {
    SquareMatrix j = k0_ + t * k1_;
    if (norm_m_ > 0.0) {
        const double root_n = std::sqrt(static_cast<double>(n_));
        const double b = b0_ + (root_n * b1_ / norm_m_) * std::atan(norm_m_ * t / root_n);
        SquareMatrix radial = m_transpose_;
        for (int i = 0; i < n_; ++i) radial(i, i) += norm_m_ * norm_m_ * t / n_;
        j += b * radial;
    }
    return j;
}

SquareMatrix JacobiClosedForm::derivative(double t) const {
    SquareMatrix jdot = k1_;
    if (norm_m_ > 0.0) {
        const double root_n = std::sqrt(static_cast<double>(n_));
        const double b = b0_ + (root_n * b1_ / norm_m_) * std::atan(norm_m_ * t / root_n);
        const double bdot = b1_ / (1.0 + norm_m_ * norm_m_ * t * t / n_);
        SquareMatrix radial = m_transpose_;
        for (int i = 0; i < n_; ++i) radial(i, i) += norm_m_ * norm_m_ * t / n_;
        jdot += bdot * radial;
        const double diag = b * norm_m_ * norm_m_ / n_;
        for (int i = 0; i < n_; ++i) jdot(i, i) += diag;
    }
    return jdot;
}

CertificateReport unbounded_certificate(const PhaseState& s, double tol) {
    const SquareMatrix& a0 = s.A().mat();
    const SquareMatrix& a1 = s.Adot();
    CertificateReport report;

    const auto symmetric_within = [tol](const SquareMatrix& x) {
        return is_symmetric(x, tol * std::max(1.0, max_abs(x)));
    };

    const PolarFactors polar = polar_decompose(a0);
    if (symmetric_within(polar.rotation.transpose() * a1))
        report.all.push_back(UnboundedCertificate::SymmetricLeaf);
    if (symmetric_within(a0.transpose() * a1))
        report.all.push_back(UnboundedCertificate::ZeroVorticity);
    if (symmetric_within(a1 * a0.transpose()))
        report.all.push_back(UnboundedCertificate::ZeroAngularMomentum);

    report.primary = report.all.empty() ? UnboundedCertificate::None : report.all.front();
    return report;
}

const char* to_string(ExponentialClass c) {
    switch (c) {
        case ExponentialClass::LinearNilpotent: return "LinearNilpotent";
        case ExponentialClass::Rotational: return "Rotational";
        case ExponentialClass::NotGeodesic: return "NotGeodesic";
    }
    return "?";
}

const char* to_string(UnboundedCertificate c) {
    switch (c) {
        case UnboundedCertificate::SymmetricLeaf: return "SymmetricLeaf";
        case UnboundedCertificate::ZeroVorticity: return "ZeroVorticity";
        case UnboundedCertificate::ZeroAngularMomentum: return "ZeroAngularMomentum";
        case UnboundedCertificate::None: return "None";
    }
    return "?";
}

}  // namespace slngeo
