#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace slngeo {

/// Dense real n-by-n matrix, row-major. The single carrier type for group
/// elements, tangent vectors and the reduced variables; n is expected to be
/// small (a few dozen at most).
class SquareMatrix {
public:
    SquareMatrix() = default;

    /// n-by-n zero matrix.
    explicit SquareMatrix(int n);

    /// Build from row-major entries; throws if data.size() != n*n or an
    /// entry is not finite.
    SquareMatrix(int n, std::vector<double> data);

    /// Build from nested rows, e.g. {{0, 1}, {0, 0}}.
    SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SquareMatrix zero(int n) { return SquareMatrix(n); }
    static SquareMatrix identity(int n);
    static SquareMatrix diagonal(const std::vector<double>& d);

    int dim() const { return n_; }
    bool is_finite() const;

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    SquareMatrix transpose() const;
    double trace() const;

    SquareMatrix& operator+=(const SquareMatrix& rhs);
    SquareMatrix& operator-=(const SquareMatrix& rhs);
    SquareMatrix& operator*=(double s);

    friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
    friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
    friend SquareMatrix operator*(SquareMatrix a, double s) { return a *= s; }
    friend SquareMatrix operator*(double s, SquareMatrix a) { return a *= s; }
    friend SquareMatrix operator/(SquareMatrix a, double s) { return a *= 1.0 / s; }
    friend SquareMatrix operator-(SquareMatrix a) { return a *= -1.0; }

    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);

    bool operator==(const SquareMatrix& rhs) const = default;

private:
    int n_ = 0;
    std::vector<double> a_;
};

/// Hilbert-Schmidt inner product tr(A B^T); the Euclidean inner product on
/// matrix space. Throws on dimension mismatch.
double hs_inner(const SquareMatrix& a, const SquareMatrix& b);

/// Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const SquareMatrix& a);

/// max_ij |a_ij|.
double max_abs(const SquareMatrix& a);

/// Largest entrywise |a_ij - b_ij|.
double max_abs_diff(const SquareMatrix& a, const SquareMatrix& b);

/// tr(A B) without forming the product.
double trace_product(const SquareMatrix& a, const SquareMatrix& b);

/// Block direct sum A (+) B.
SquareMatrix direct_sum(const SquareMatrix& a, const SquareMatrix& b);

// The 2x2 orthogonal basis used throughout the block computations:
// I2 = identity, K2 = diag(1,-1), S2 = offdiag(1,1), Z2 = rotation generator.
SquareMatrix mat_I2();
SquareMatrix mat_K2();
SquareMatrix mat_S2();
SquareMatrix mat_Z2();

void require_same_dim(const SquareMatrix& a, const SquareMatrix& b, const char* what);

}  // namespace slngeo
