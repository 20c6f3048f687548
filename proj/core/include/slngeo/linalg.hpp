#pragma once

#include <optional>
#include <utility>

#include "slngeo/matrix.hpp"

namespace slngeo {

/// Result of the polar decomposition A = rotation * stretch with rotation
/// special orthogonal and stretch symmetric positive definite.
struct PolarFactors {
    SquareMatrix rotation;
    SquareMatrix stretch;
};

/// LU factorization with partial pivoting, kept around so determinant,
/// inverse and solves share one elimination.
class LuDecomposition {
public:
    explicit LuDecomposition(const SquareMatrix& a);

    bool singular() const { return singular_; }
    double determinant() const;
    SquareMatrix inverse() const;
    std::vector<double> solve(const std::vector<double>& rhs) const;

private:
    int n_;
    SquareMatrix lu_;
    std::vector<int> piv_;
    int pivot_sign_ = 1;
    bool singular_ = false;
};

double determinant(const SquareMatrix& a);

/// Inverse via LU with partial pivoting; throws std::domain_error if singular.
SquareMatrix inverse(const SquareMatrix& a);

/// Split V into (symmetric, antisymmetric) halves: ((V+V^T)/2, (V-V^T)/2).
std::pair<SquareMatrix, SquareMatrix> sym_skew_split(const SquareMatrix& v);

SquareMatrix symmetric_part(const SquareMatrix& v);
SquareMatrix antisymmetric_part(const SquareMatrix& v);

bool is_symmetric(const SquareMatrix& a, double tol);
bool is_antisymmetric(const SquareMatrix& a, double tol);

/// True when A is symmetric positive definite (checked by Cholesky).
bool is_spd(const SquareMatrix& a, double sym_tol = 1e-12);

/// True when U^T U = I within tol and det(U) > 0.
bool is_special_orthogonal(const SquareMatrix& u, double tol = 1e-10);

/// Polar decomposition A = O P via the Newton iteration X <- (X + X^-T)/2,
/// converged to 1e-13; requires det(A) > 0. Throws std::domain_error on
/// singular or orientation-reversing input.
PolarFactors polar_decompose(const SquareMatrix& a);

/// Matrix exponential e^C, relative accuracy ~1e-12. Nilpotent input is
/// summed as an exact finite polynomial; antisymmetric input that is zero
/// outside the 2x2 diagonal blocks is exponentiated as exact plane rotations;
/// everything else goes through scaling-and-squaring with a truncated series.
SquareMatrix matrix_exp(const SquareMatrix& c);

/// Smallest k <= n with M^k = 0 (within tol, relative to max(1,|M|)^k), or
/// nullopt when M is not nilpotent. The power test is cross-checked against
/// the vanishing of tr M^j for j = 1..n; if the two verdicts disagree the
/// input is numerically ill-conditioned and a std::domain_error is thrown.
std::optional<int> nilpotency_index(const SquareMatrix& m, double tol = 1e-9);

/// U A U^T for special orthogonal U; preserves symmetry type, spectrum,
/// determinant and HS norm. Throws std::invalid_argument when U is not
/// special orthogonal within 1e-10.
SquareMatrix orthogonal_conjugate(const SquareMatrix& a, const SquareMatrix& u);

}  // namespace slngeo
