#include "slngeo/group.hpp"

#include <cmath>
#include <string>

namespace slngeo {

GroupPoint::GroupPoint(SquareMatrix mat, double det_tolerance)
    : mat_(std::move(mat)), inv_(SquareMatrix::identity(1)), det_tolerance_(det_tolerance) {
    if (!mat_.is_finite())
        throw InvariantError("GroupPoint: entries must be finite");
    LuDecomposition lu(mat_);
    det_ = lu.determinant();
    if (std::abs(det_ - 1.0) > det_tolerance_)
        throw InvariantError("GroupPoint: |det - 1| = " + std::to_string(std::abs(det_ - 1.0)) +
                             " exceeds tolerance " + std::to_string(det_tolerance_));
    const int n = mat_.dim();
    const double norm_sq = hs_inner(mat_, mat_);
    if (norm_sq < n * (1.0 - 1e-12))
        throw InvariantError("GroupPoint: |A|^2 >= n violated (norm too small for det = 1)");
    inv_ = lu.inverse();
}

TangentVector::TangentVector(GroupPoint base, SquareMatrix vec, double tangency_tolerance)
    : base_(std::move(base)), vec_(std::move(vec)) {
    require_same_dim(base_.mat(), vec_, "TangentVector");
    if (!vec_.is_finite())
        throw InvariantError("TangentVector: entries must be finite");
    const double defect = std::abs(trace_product(base_.inv(), vec_));
    const double scale = hs_norm(vec_) * hs_norm(base_.inv());
    if (defect > tangency_tolerance * std::max(scale, 1e-300))
        throw InvariantError("TangentVector: tr(A^-1 V) = " + std::to_string(defect) +
                             " violates tangency (tolerance " + std::to_string(tangency_tolerance) + ")");
}

SquareMatrix project_to_tangent(const GroupPoint& a, const SquareMatrix& v) {
    const SquareMatrix normal_dir = a.inv().transpose();
    const double c = trace_product(a.inv(), v) / hs_inner(normal_dir, normal_dir);
    return v - c * normal_dir;
}

}  // namespace slngeo
