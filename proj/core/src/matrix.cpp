#include "slngeo/matrix.hpp"

#include <cmath>
#include <string>

namespace slngeo {

SquareMatrix::SquareMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
    if (n < 1) throw std::invalid_argument("SquareMatrix: dimension must be >= 1");
}

SquareMatrix::SquareMatrix(int n, std::vector<double> data) : n_(n), a_(std::move(data)) {
    if (n < 1) throw std::invalid_argument("SquareMatrix: dimension must be >= 1");
    if (a_.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("SquareMatrix: data size does not match dimension");
    if (!is_finite())
        throw std::invalid_argument("SquareMatrix: entries must be finite");
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    n_ = static_cast<int>(rows.size());
    if (n_ < 1) throw std::invalid_argument("SquareMatrix: dimension must be >= 1");
    a_.reserve(static_cast<std::size_t>(n_) * n_);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n_)
            throw std::invalid_argument("SquareMatrix: rows must all have length n");
        for (double v : row) a_.push_back(v);
    }
    if (!is_finite())
        throw std::invalid_argument("SquareMatrix: entries must be finite");
}

SquareMatrix SquareMatrix::identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SquareMatrix SquareMatrix::diagonal(const std::vector<double>& d) {
    SquareMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
}

bool SquareMatrix::is_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

SquareMatrix SquareMatrix::transpose() const {
    SquareMatrix t(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double SquareMatrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
}

SquareMatrix& SquareMatrix::operator+=(const SquareMatrix& rhs) {
    require_same_dim(*this, rhs, "operator+");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
}

SquareMatrix& SquareMatrix::operator-=(const SquareMatrix& rhs) {
    require_same_dim(*this, rhs, "operator-");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
}

SquareMatrix& SquareMatrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_dim(a, b, "operator* (matmul)");
    const int n = a.dim();
    SquareMatrix c(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

double hs_inner(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_dim(a, b, "hs_inner");
    double s = 0.0;
    const auto& x = a.data();
    const auto& y = b.data();
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

double hs_norm(const SquareMatrix& a) { return std::sqrt(hs_inner(a, a)); }

double max_abs(const SquareMatrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_dim(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k)
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

double trace_product(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_dim(a, b, "trace_product");
    const int n = a.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s += a(i, k) * b(k, i);
    return s;
}

SquareMatrix direct_sum(const SquareMatrix& a, const SquareMatrix& b) {
    const int na = a.dim(), nb = b.dim();
    SquareMatrix c(na + nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) c(i, j) = a(i, j);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) c(na + i, na + j) = b(i, j);
    return c;
}

SquareMatrix mat_I2() { return SquareMatrix::identity(2); }
SquareMatrix mat_K2() { return SquareMatrix{{1.0, 0.0}, {0.0, -1.0}}; }
SquareMatrix mat_S2() { return SquareMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
SquareMatrix mat_Z2() { return SquareMatrix{{0.0, -1.0}, {1.0, 0.0}}; }

void require_same_dim(const SquareMatrix& a, const SquareMatrix& b, const char* what) {
    if (a.dim() != b.dim())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace slngeo
