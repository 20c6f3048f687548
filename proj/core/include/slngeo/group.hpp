#pragma once

#include "slngeo/errors.hpp"
#include "slngeo/linalg.hpp"
#include "slngeo/matrix.hpp"

namespace slngeo {

/// A point of the unit-determinant group, validated on construction:
/// |det - 1| <= det_tolerance and |A|^2 >= n (which every unit-determinant
/// matrix satisfies by AM-GM on its squared singular values). The inverse is
/// computed once and cached since nearly every geometric quantity needs it.
class GroupPoint {
public:
    explicit GroupPoint(SquareMatrix mat, double det_tolerance = 1e-10);

    const SquareMatrix& mat() const { return mat_; }
    const SquareMatrix& inv() const { return inv_; }
    double det() const { return det_; }
    int dim() const { return mat_.dim(); }
    double det_tolerance() const { return det_tolerance_; }

private:
    SquareMatrix mat_;
    SquareMatrix inv_;
    double det_ = 1.0;
    double det_tolerance_;
};

/// Ambient-matrix tangent vector at a group point: tr(A^-1 V) = 0 within
/// tangency_tolerance (relative), the derivative of the determinant
/// constraint.
class TangentVector {
public:
    TangentVector(GroupPoint base, SquareMatrix vec, double tangency_tolerance = 1e-9);

    const GroupPoint& base() const { return base_; }
    const SquareMatrix& vec() const { return vec_; }

private:
    GroupPoint base_;
    SquareMatrix vec_;
};

/// Orthogonal projection of an arbitrary matrix onto the tangent space at A
/// (subtracts the component along the unit normal direction A^-T).
SquareMatrix project_to_tangent(const GroupPoint& a, const SquareMatrix& v);

}  // namespace slngeo
