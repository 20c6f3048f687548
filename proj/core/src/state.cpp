#include "slngeo/state.hpp"

#include <cmath>
#include <string>

namespace slngeo {

PhaseState::PhaseState(GroupPoint a, SquareMatrix adot, double tangency_tolerance)
    : a_(std::move(a)), adot_(std::move(adot)) {
    require_same_dim(a_.mat(), adot_, "PhaseState");
    if (!adot_.is_finite())
        throw InvariantError("PhaseState: velocity entries must be finite");
    const double defect = std::abs(trace_product(a_.inv(), adot_));
    const double scale = std::max(1.0, hs_norm(adot_) * hs_norm(a_.inv()));
    if (defect > tangency_tolerance * scale)
        throw InvariantError("PhaseState: tr(A^-1 A') = " + std::to_string(defect) +
                             " violates tangency");
}

ReducedState::ReducedState(SquareMatrix beta, SquareMatrix omega, SquareMatrix zeta)
    : beta_(std::move(beta)), omega_(std::move(omega)), zeta_(std::move(zeta)) {
    require_same_dim(beta_, omega_, "ReducedState");
    require_same_dim(beta_, zeta_, "ReducedState");
    if (!beta_.is_finite() || !omega_.is_finite() || !zeta_.is_finite())
        throw InvariantError("ReducedState: entries must be finite");

    const double bscale = std::max(1.0, max_abs(beta_));
    const double wscale = std::max(1.0, max_abs(omega_));
    const double zscale = std::max(1.0, max_abs(zeta_));
    if (!is_symmetric(omega_, 1e-12 * wscale))
        throw InvariantError("ReducedState: omega is not symmetric");
    if (!is_antisymmetric(zeta_, 1e-12 * zscale))
        throw InvariantError("ReducedState: zeta is not antisymmetric");
    if (!is_spd(beta_, 1e-12))
        throw InvariantError("ReducedState: beta is not symmetric positive definite");
    const double det = determinant(beta_);
    if (std::abs(det - 1.0) > 1e-9 * std::pow(bscale, beta_.dim()))
        throw InvariantError("ReducedState: det(beta) = " + std::to_string(det) + " is not 1");
    const double compat = std::abs(trace_product(beta_, omega_));
    if (compat > 1e-9 * std::max(1.0, hs_norm(beta_) * hs_norm(omega_)))
        throw InvariantError("ReducedState: compatibility tr(beta omega) = " +
                             std::to_string(compat) + " is not 0");
}

JacobiState::JacobiState(PhaseState along, SquareMatrix j, SquareMatrix jdot,
                         double tangency_tolerance)
    : along_(std::move(along)), j_(std::move(j)), jdot_(std::move(jdot)) {
    require_same_dim(along_.A().mat(), j_, "JacobiState");
    require_same_dim(along_.A().mat(), jdot_, "JacobiState");
    if (!j_.is_finite() || !jdot_.is_finite())
        throw InvariantError("JacobiState: entries must be finite");
    const double defect = std::abs(trace_product(along_.A().inv(), j_));
    const double scale = std::max(1.0, hs_norm(j_) * hs_norm(along_.A().inv()));
    if (defect > tangency_tolerance * scale)
        throw InvariantError("JacobiState: tr(A^-1 J) = " + std::to_string(defect) +
                             " violates tangency along the geodesic");
}

double JacobiState::jdot_covariant_norm() const {
    return hs_norm(project_to_tangent(along_.A(), jdot_));
}

}  // namespace slngeo
