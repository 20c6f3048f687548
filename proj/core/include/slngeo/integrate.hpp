#pragma once

#include <utility>

#include "slngeo/ode.hpp"
#include "slngeo/state.hpp"

namespace slngeo {

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double dt_out = 0.01;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

/// Geodesic acceleration A'' = [tr(A' A^-1 A' A^-1) / tr(A^-1 A^-T)] A^-T;
/// purely normal by construction.
SquareMatrix geodesic_rhs(const PhaseState& s);

/// Radial-variable time derivatives (beta', omega'): beta' = -beta omega beta,
/// omega' = 1/2 (omega+zeta)^T beta (omega+zeta)
///        + 1/2 [tr(omega beta omega beta) + tr(zeta beta zeta beta)] / tr(beta) * I.
/// zeta' = 0 is implicit (it is a constant of motion).
std::pair<SquareMatrix, SquareMatrix> reduced_rhs(const ReducedState& s);

/// Project a phase state onto the radial variables.
ReducedState to_reduced(const PhaseState& s);

/// Second variation of the geodesic equation: J'' as a function of
/// (A, A', J, J').
SquareMatrix jacobi_rhs(const JacobiState& s);

/// Monitor for one state against the reference (initial) state. The virial
/// residual needs neighboring samples and is filled by the trajectory
/// drivers; it is 0 here.
InvariantReport invariant_report(const PhaseState& s, const PhaseState& reference);
InvariantReport invariant_report(const ReducedState& s, const ReducedState& reference);

/// Integrate the geodesic flow from a phase-space or radial initial state.
/// Adaptive embedded Runge-Kutta with per-step constraint projection; samples
/// every opts.dt_out carry full invariant reports. Deterministic for fixed
/// inputs. Blow-up truncates the trajectory and records a diagnostic.
Trajectory integrate_geodesic(const PhaseState& init, double t_end, const IntegratorOptions& opts = {});
Trajectory integrate_geodesic(const ReducedState& init, double t_end, const IntegratorOptions& opts = {});

/// Joint integration of the geodesic and one Jacobi field along it.
Trajectory integrate_jacobi(const JacobiState& init, double t_end, const IntegratorOptions& opts = {});

}  // namespace slngeo
