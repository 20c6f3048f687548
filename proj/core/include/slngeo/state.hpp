#pragma once

#include <string>
#include <variant>
#include <vector>

#include "slngeo/group.hpp"

namespace slngeo {

/// Position/velocity pair (A, A') on the tangent bundle; tangency
/// tr(A^-1 A') = 0 is validated to 1e-9 relative.
class PhaseState {
public:
    PhaseState(GroupPoint a, SquareMatrix adot, double tangency_tolerance = 1e-9);

    const GroupPoint& A() const { return a_; }
    const SquareMatrix& Adot() const { return adot_; }
    int dim() const { return a_.dim(); }

private:
    GroupPoint a_;
    SquareMatrix adot_;
};

/// The radial first-order variables (beta, omega, zeta) =
/// (A^-1 A^-T, A^T A' + A'^T A, A^T A' - A'^T A). beta is SPD with unit
/// determinant, omega symmetric, zeta antisymmetric and constant in time,
/// and tr(beta omega) = 0 expresses tangency.
class ReducedState {
public:
    ReducedState(SquareMatrix beta, SquareMatrix omega, SquareMatrix zeta);

    const SquareMatrix& beta() const { return beta_; }
    const SquareMatrix& omega() const { return omega_; }
    const SquareMatrix& zeta() const { return zeta_; }
    int dim() const { return beta_.dim(); }

private:
    SquareMatrix beta_;
    SquareMatrix omega_;
    SquareMatrix zeta_;
};

/// Geodesic-deviation state co-integrated with its underlying geodesic:
/// (A, A', J, J') with J tangent along the curve.
class JacobiState {
public:
    JacobiState(PhaseState along, SquareMatrix j, SquareMatrix jdot,
                double tangency_tolerance = 1e-9);

    const PhaseState& along() const { return along_; }
    const SquareMatrix& J() const { return j_; }
    const SquareMatrix& Jdot() const { return jdot_; }
    int dim() const { return along_.dim(); }

    /// |J| and the norm of the covariant derivative (tangential part of J').
    double j_norm() const { return hs_norm(j_); }
    double jdot_covariant_norm() const;

private:
    PhaseState along_;
    SquareMatrix j_;
    SquareMatrix jdot_;
};

/// Per-sample monitor of the conserved and derived quantities. Drifts are
/// HS distances from the values at the reference (initial) state; the virial
/// residual is filled in by a finite-difference pass over adjacent samples.
struct InvariantReport {
    double energy = 0.0;
    double det_drift = 0.0;
    double zeta_drift = 0.0;
    double angmom_drift = 0.0;
    double sff = 0.0;
    double virial_residual = 0.0;
    double trace_omega = 0.0;

    /// The text's energy convention (twice the kinetic energy <A',A'>),
    /// kept for comparability with the block-diagonal energies.
    double paper_energy() const { return 2.0 * energy; }
};

using StateVariant = std::variant<PhaseState, ReducedState, JacobiState>;

struct TrajectorySample {
    double t;
    StateVariant state;
    InvariantReport report;
};

/// Time-ordered samples with attached invariant reports. `truncated` is set
/// when the stepper gave up (step-size underflow / state blow-up) before
/// reaching the requested end time; the partial trajectory is still valid.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    bool truncated = false;
    std::string truncation_reason;

    bool empty() const { return samples.empty(); }
    const TrajectorySample& front() const { return samples.front(); }
    const TrajectorySample& back() const { return samples.back(); }
};

}  // namespace slngeo
