#include "slngeo/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace slngeo {

SquareMatrix unit_normal(const GroupPoint& a) {
    const SquareMatrix ait = a.inv().transpose();
    return ait / hs_norm(ait);
}

SquareMatrix normal_derivative(const GroupPoint& a, const SquareMatrix& x) {
    const SquareMatrix& ai = a.inv();
    const SquareMatrix ait = ai.transpose();
    const double ninv = hs_norm(ai);
    const SquareMatrix first = (ait * x.transpose() * ait) / (-ninv);
    const double coeff = hs_inner(ai, ai * x * ai) / (ninv * ninv);
    return first + coeff * (ait / ninv);
}

double second_fundamental_form(const GroupPoint& a, const SquareMatrix& x, const SquareMatrix& y) {
    const SquareMatrix& ai = a.inv();
    return trace_product(ai * x, ai * y) / hs_norm(ai);
}

double second_fundamental_form(const TangentVector& x, const TangentVector& y) {
    if (!(x.base().mat() == y.base().mat()))
        throw std::invalid_argument("second_fundamental_form: tangent vectors based at different points");
    return second_fundamental_form(x.base(), x.vec(), y.vec());
}

double sff_reduced(const SquareMatrix& beta, const SquareMatrix& omega, const SquareMatrix& zeta) {
    const SquareMatrix sum = omega + zeta;
    const SquareMatrix sb = sum * beta;
    const double quad = trace_product(sb, sb);
    const double cross = trace_product(omega * beta, zeta * beta);
    const double scale = std::max(1.0, hs_norm(omega) * hs_norm(beta) * hs_norm(zeta) * hs_norm(beta));
    if (std::abs(cross) > 1e-8 * scale)
        throw InvariantError("sff_reduced: cross term tr(omega beta zeta beta) = " +
                             std::to_string(cross) + " does not vanish");
    return quad / (4.0 * std::sqrt(beta.trace()));
}

double sff_reduced(const ReducedState& s) { return sff_reduced(s.beta(), s.omega(), s.zeta()); }

double riemann(const GroupPoint& a, const SquareMatrix& x, const SquareMatrix& y,
               const SquareMatrix& z, const SquareMatrix& w) {
    return second_fundamental_form(a, x, z) * second_fundamental_form(a, y, w) -
           second_fundamental_form(a, y, z) * second_fundamental_form(a, x, w);
}

double sectional_curvature(const GroupPoint& a, const SquareMatrix& x, const SquareMatrix& y) {
    const double xx = hs_inner(x, x);
    const double yy = hs_inner(y, y);
    const double xy = hs_inner(x, y);
    const double gram = xx * yy - xy * xy;
    if (gram <= 1e-12 * xx * yy)
        throw std::invalid_argument("sectional_curvature: inputs are numerically parallel");
    return riemann(a, x, y, x, y) / gram;
}

double pressure_coefficient(const GroupPoint& a, const SquareMatrix& adot) {
    const double ii = second_fundamental_form(a, adot, adot);
    return -ii / (2.0 * hs_norm(a.inv()));
}

int taylor_sign(const GroupPoint& a, const SquareMatrix& adot, double tol) {
    const double ii = second_fundamental_form(a, adot, adot);
    if (ii > tol) return 1;
    if (ii < -tol) return -1;
    return 0;
}

}  // namespace slngeo
