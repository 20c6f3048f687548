#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "slngeo/state.hpp"

namespace slngeo {

/// Straight-line geodesic t -> B (I + t M) with M nilpotent; index is the
/// nilpotency index of M. Construction validates both and spot-checks
/// |det A(t) - 1| <= 1e-10 at t in {-10, 1, 10}.
class LinearGeodesicSpec {
public:
    LinearGeodesicSpec(GroupPoint b, SquareMatrix m);

    const GroupPoint& B() const { return b_; }
    const SquareMatrix& M() const { return m_; }
    int index() const { return index_; }

    SquareMatrix at(double t) const;           // B (I + t M)
    const SquareMatrix& velocity() const { return bm_; }  // B M, constant in t
    PhaseState phase_state(double t = 0.0) const;

private:
    GroupPoint b_;
    SquareMatrix m_;
    SquareMatrix bm_;
    int index_;
};

/// Data of a constant-norm rotating geodesic in even dimension n = 2m:
/// paired singular values lambda_i (prod lambda_i^2 = 1), negative kappa,
/// a rotation sense per plane, and optional special-orthogonal conjugators
/// (U, V) so that the base point is U Lambda V.
struct RotationalSpec {
    std::vector<double> lambdas;
    double kappa = -1.0;
    std::vector<int> signs;
    std::optional<std::pair<SquareMatrix, SquareMatrix>> conjugators;
};

/// Assemble (B, C) from a RotationalSpec so that t -> B exp(tC) is a
/// constant-norm geodesic: C is antisymmetric with C^2 = kappa (B^T B)^-1.
/// Throws std::invalid_argument when the spec is inconsistent.
std::pair<GroupPoint, SquareMatrix> build_rotational(const RotationalSpec& spec);

enum class ExponentialClass { LinearNilpotent, Rotational, NotGeodesic };

struct ExponentialVerdict {
    ExponentialClass kind = ExponentialClass::NotGeodesic;
    double kappa = 0.0;  // fitted proportionality constant, Rotational only
};

/// True iff the line A0 + t A1 lies entirely in the unit-determinant group,
/// i.e. A0 has unit determinant and A0^-1 A1 is nilpotent. A0 that is not
/// (numerically) unit-determinant yields false, not an error.
bool classify_line(const SquareMatrix& a0, const SquareMatrix& a1, double tol = 1e-9);

/// Classify t -> B exp(tC): LinearNilpotent when C^2 = 0; Rotational (even
/// n only) when C is antisymmetric with C^2 = kappa (B^T B)^-1 for the
/// fitted kappa = tr(C^2)/tr((B^T B)^-1); NotGeodesic otherwise.
/// Throws std::invalid_argument when tr C != 0 (not an infinitesimal
/// volume-preserving map) or B is not unit-determinant.
ExponentialVerdict classify_exponential(const SquareMatrix& b, const SquareMatrix& c,
                                        double tol = 1e-10);

/// Conjugate the rotation generator across the base point: C' = B C B^-1,
/// which satisfies exp(tC') B = B exp(tC) and is again antisymmetric for
/// rotational (B, C). Throws when (B, C) is not Rotational or the
/// antisymmetry/intertwining identities fail numerically.
SquareMatrix left_right_transport(const GroupPoint& b, const SquareMatrix& c);

/// Orthonormal basis of the subspace orthogonal to every B^-T (M^T)^k;
/// its elements are tangent along the whole linear geodesic and carry
/// Jacobi fields that stay linear in t.
struct PerpBasis {
    GroupPoint B;
    SquareMatrix M;
    std::vector<SquareMatrix> basis;  // size n^2 - index
};

PerpBasis perp_basis(const GroupPoint& b, const SquareMatrix& m);

/// Closed-form Jacobi fields along A = I + tM when M^2 = 0:
///   J(t) = b(t) (|M|^2 t / n I + M^T) + K0 + t K1,
///   b(t) = b0 + (sqrt(n) b1 / |M|) arctan(|M| t / sqrt(n)),
/// with K0, K1 in the perp subspace of (I, M).
class JacobiClosedForm {
public:
    JacobiClosedForm(SquareMatrix m, double b0, double b1, SquareMatrix k0, SquareMatrix k1);

    SquareMatrix operator()(double t) const;
    SquareMatrix derivative(double t) const;

private:
    SquareMatrix m_transpose_;
    SquareMatrix k0_;
    SquareMatrix k1_;
    double b0_, b1_, norm_m_;
    int n_;
};

enum class UnboundedCertificate { SymmetricLeaf, ZeroVorticity, ZeroAngularMomentum, None };

/// All certificate conditions satisfied by the initial data, in priority
/// order SymmetricLeaf > ZeroVorticity > ZeroAngularMomentum. A non-None
/// primary certificate guarantees II(A',A') > 0 along the whole geodesic
/// and hence linear norm growth.
struct CertificateReport {
    UnboundedCertificate primary = UnboundedCertificate::None;
    std::vector<UnboundedCertificate> all;
};

CertificateReport unbounded_certificate(const PhaseState& s, double tol = 1e-10);

const char* to_string(ExponentialClass c);
const char* to_string(UnboundedCertificate c);

}  // namespace slngeo
