#pragma once

#include "slngeo/group.hpp"
#include "slngeo/state.hpp"

namespace slngeo {

/// Unit normal A^-T / |A^-T| to the unit-determinant level set at A.
SquareMatrix unit_normal(const GroupPoint& a);

/// Directional derivative of the unit normal field along a curve through A
/// with velocity X (ambient matrix). Used by the curvature oracles.
SquareMatrix normal_derivative(const GroupPoint& a, const SquareMatrix& x);

/// Second fundamental form II(X, Y) = tr(A^-1 X A^-1 Y) / |A^-1| on ambient
/// tangent matrices. Symmetric; |II(X,Y)| <= |A^-1| |X| |Y|.
double second_fundamental_form(const GroupPoint& a, const SquareMatrix& x, const SquareMatrix& y);

/// Typed overload; throws std::invalid_argument when X and Y are based at
/// different points.
double second_fundamental_form(const TangentVector& x, const TangentVector& y);

/// II(A', A') evaluated in the radial variables:
/// tr((omega+zeta) beta (omega+zeta) beta) / (4 sqrt(tr beta)). The
/// mixed term tr(omega beta zeta beta) vanishes identically and is asserted.
double sff_reduced(const ReducedState& s);
double sff_reduced(const SquareMatrix& beta, const SquareMatrix& omega, const SquareMatrix& zeta);

/// Riemann tensor <R(X,Y)Z, W> via the Gauss equation,
/// [II(X,Z) II(Y,W) - II(Y,Z) II(X,W)] with the common normalization
/// absorbed; antisymmetric in (X,Y) and (Z,W), symmetric under pair swap.
double riemann(const GroupPoint& a, const SquareMatrix& x, const SquareMatrix& y,
               const SquareMatrix& z, const SquareMatrix& w);

/// Sectional curvature of the plane spanned by X, Y at A. Throws
/// std::invalid_argument when the inputs are (numerically) parallel:
/// Gram determinant <= 1e-12 |X|^2 |Y|^2.
double sectional_curvature(const GroupPoint& a, const SquareMatrix& x, const SquareMatrix& y);

/// Coefficient of |A^-1 y|^2 in the fluid pressure: -II(A',A') / (2 |A^-1|).
double pressure_coefficient(const GroupPoint& a, const SquareMatrix& adot);

/// Sign of II(A',A'), the Taylor-sign (physicality) indicator: +1, 0, -1.
int taylor_sign(const GroupPoint& a, const SquareMatrix& adot, double tol = 0.0);

}  // namespace slngeo
