#include "slngeo/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slngeo {

LuDecomposition::LuDecomposition(const SquareMatrix& a)
    : n_(a.dim()), lu_(a), piv_(static_cast<std::size_t>(a.dim())) {
    for (int i = 0; i < n_; ++i) piv_[static_cast<std::size_t>(i)] = i;
    for (int col = 0; col < n_; ++col) {
        int p = col;
        double best = std::abs(lu_(col, col));
        for (int r = col + 1; r < n_; ++r) {
            const double v = std::abs(lu_(r, col));
            if (v > best) { best = v; p = r; }
        }
        if (best == 0.0) { singular_ = true; continue; }
        if (p != col) {
            for (int j = 0; j < n_; ++j) std::swap(lu_(p, j), lu_(col, j));
            std::swap(piv_[static_cast<std::size_t>(p)], piv_[static_cast<std::size_t>(col)]);
            pivot_sign_ = -pivot_sign_;
        }
        const double d = lu_(col, col);
        for (int r = col + 1; r < n_; ++r) {
            const double f = lu_(r, col) / d;
            lu_(r, col) = f;
            for (int j = col + 1; j < n_; ++j) lu_(r, j) -= f * lu_(col, j);
        }
    }
}

double LuDecomposition::determinant() const {
    if (singular_) return 0.0;
    double det = pivot_sign_;
    for (int i = 0; i < n_; ++i) det *= lu_(i, i);
    return det;
}

std::vector<double> LuDecomposition::solve(const std::vector<double>& rhs) const {
    if (singular_) throw std::domain_error("LuDecomposition::solve: matrix is singular");
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(piv_[static_cast<std::size_t>(i)])];
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= lu_(i, j) * x[static_cast<std::size_t>(j)];
    for (int i = n_ - 1; i >= 0; --i) {
        for (int j = i + 1; j < n_; ++j) x[static_cast<std::size_t>(i)] -= lu_(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] /= lu_(i, i);
    }
    return x;
}

SquareMatrix LuDecomposition::inverse() const {
    if (singular_) throw std::domain_error("inverse: matrix is singular");
    SquareMatrix inv(n_);
    std::vector<double> e(static_cast<std::size_t>(n_), 0.0);
    for (int col = 0; col < n_; ++col) {
        e.assign(static_cast<std::size_t>(n_), 0.0);
        e[static_cast<std::size_t>(col)] = 1.0;
        const auto x = solve(e);
        for (int i = 0; i < n_; ++i) inv(i, col) = x[static_cast<std::size_t>(i)];
    }
    return inv;
}

double determinant(const SquareMatrix& a) { return LuDecomposition(a).determinant(); }

SquareMatrix inverse(const SquareMatrix& a) { return LuDecomposition(a).inverse(); }

std::pair<SquareMatrix, SquareMatrix> sym_skew_split(const SquareMatrix& v) {
    return {symmetric_part(v), antisymmetric_part(v)};
}

SquareMatrix symmetric_part(const SquareMatrix& v) { return 0.5 * (v + v.transpose()); }

SquareMatrix antisymmetric_part(const SquareMatrix& v) { return 0.5 * (v - v.transpose()); }

bool is_symmetric(const SquareMatrix& a, double tol) {
    return max_abs_diff(a, a.transpose()) <= tol;
}

bool is_antisymmetric(const SquareMatrix& a, double tol) {
    return max_abs(a + a.transpose()) <= tol;
}

bool is_spd(const SquareMatrix& a, double sym_tol) {
    if (!is_symmetric(a, sym_tol * std::max(1.0, max_abs(a)))) return false;
    // Cholesky without the square roots postponed: plain LL^T attempt.
    const int n = a.dim();
    SquareMatrix l(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) return false;
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return true;
}

bool is_special_orthogonal(const SquareMatrix& u, double tol) {
    const SquareMatrix gram = u.transpose() * u;
    if (max_abs_diff(gram, SquareMatrix::identity(u.dim())) > tol) return false;
    return determinant(u) > 0.0;
}

PolarFactors polar_decompose(const SquareMatrix& a) {
    const double det = determinant(a);
    if (det == 0.0) throw std::domain_error("polar_decompose: singular input");
    if (det < 0.0) throw std::domain_error("polar_decompose: negative determinant input");

    SquareMatrix x = a;
    constexpr double kTol = 1e-13;
    constexpr int kMaxIter = 100;
    for (int it = 0; it < kMaxIter; ++it) {
        const SquareMatrix next = 0.5 * (x + inverse(x).transpose());
        const double delta = max_abs_diff(next, x);
        x = next;
        if (delta <= kTol * std::max(1.0, max_abs(x))) break;
    }
    PolarFactors f{x, symmetric_part(x.transpose() * a)};

    const double scale = std::max(1.0, max_abs(a));
    if (!is_special_orthogonal(f.rotation, 1e-10) ||
        max_abs_diff(f.rotation * f.stretch, a) > 1e-10 * scale || !is_spd(f.stretch, 1e-11))
        throw std::domain_error("polar_decompose: iteration failed to produce valid factors");
    return f;
}

namespace {

// Zero outside the 2x2 diagonal blocks (trailing 1x1 when n is odd), each
// block a multiple of the plane-rotation generator.
bool is_planar_rotation_generator(const SquareMatrix& c, double tol) {
    const int n = c.dim();
    const int m = n / 2;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const bool in_block = (i < 2 * m) && (j < 2 * m) && (i / 2 == j / 2);
            if (!in_block && std::abs(c(i, j)) > tol) return false;
        }
    }
    for (int b = 0; b < m; ++b) {
        const int i = 2 * b;
        if (std::abs(c(i, i)) > tol || std::abs(c(i + 1, i + 1)) > tol) return false;
        if (std::abs(c(i, i + 1) + c(i + 1, i)) > tol) return false;
    }
    return true;
}

SquareMatrix exp_planar_rotation(const SquareMatrix& c) {
    const int n = c.dim();
    SquareMatrix e = SquareMatrix::identity(n);
    for (int b = 0; b + 1 < n; b += 2) {
        const double w = c(b + 1, b);
        e(b, b) = std::cos(w);
        e(b + 1, b + 1) = std::cos(w);
        e(b, b + 1) = -std::sin(w);
        e(b + 1, b) = std::sin(w);
    }
    return e;
}

SquareMatrix exp_series(const SquareMatrix& c) {
    // Scaling and squaring with the Taylor series run to machine precision.
    const double norm = hs_norm(c);
    int squarings = 0;
    SquareMatrix t = c;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        t *= std::ldexp(1.0, -squarings);
    }
    SquareMatrix sum = SquareMatrix::identity(c.dim());
    SquareMatrix term = SquareMatrix::identity(c.dim());
    for (int k = 1; k <= 40; ++k) {
        term = term * t;
        term *= 1.0 / k;
        sum += term;
        if (hs_norm(term) <= std::numeric_limits<double>::epsilon() * hs_norm(sum)) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

}  // namespace

SquareMatrix matrix_exp(const SquareMatrix& c) {
    // Exact finite polynomial when the input is (tightly) nilpotent.
    if (auto idx = nilpotency_index(c, 1e-12)) {
        SquareMatrix sum = SquareMatrix::identity(c.dim());
        SquareMatrix term = SquareMatrix::identity(c.dim());
        for (int k = 1; k < *idx; ++k) {
            term = term * c;
            term *= 1.0 / k;
            sum += term;
        }
        return sum;
    }
    const double scale = std::max(1.0, max_abs(c));
    if (is_antisymmetric(c, 1e-14 * scale) && is_planar_rotation_generator(c, 1e-14 * scale))
        return exp_planar_rotation(c);
    return exp_series(c);
}

std::optional<int> nilpotency_index(const SquareMatrix& m, double tol) {
    const int n = m.dim();
    const double base = std::max(1.0, hs_norm(m));

    int power_index = 0;  // 0 = not found
    SquareMatrix p = m;
    double threshold = tol * base;
    for (int k = 1; k <= n; ++k) {
        if (hs_norm(p) <= threshold) { power_index = k; break; }
        if (k < n) {
            p = p * m;
            threshold *= base;
        }
    }

    bool traces_vanish = true;
    SquareMatrix q = m;
    double tr_threshold = tol * base;
    for (int j = 1; j <= n; ++j) {
        if (std::abs(q.trace()) > tr_threshold * n) { traces_vanish = false; break; }
        if (j < n) {
            q = q * m;
            tr_threshold *= base;
        }
    }

    if ((power_index != 0) != traces_vanish)
        throw std::domain_error(
            "nilpotency_index: power and trace tests disagree (ill-conditioned input)");
    if (power_index == 0) return std::nullopt;
    return power_index;
}

SquareMatrix orthogonal_conjugate(const SquareMatrix& a, const SquareMatrix& u) {
    require_same_dim(a, u, "orthogonal_conjugate");
    if (!is_special_orthogonal(u, 1e-10))
        throw std::invalid_argument("orthogonal_conjugate: U is not special orthogonal");
    return u * a * u.transpose();
}

}  // namespace slngeo
