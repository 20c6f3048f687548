#pragma once

// Shared generators and numerical oracles for the test suites. All
// randomness flows through one mt19937_64 whose seed can be pinned with the
// SLNGEO_SEED environment variable.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

#include "slngeo/group.hpp"
#include "slngeo/linalg.hpp"
#include "slngeo/matrix.hpp"

namespace slntest {

using slngeo::GroupPoint;
using slngeo::SquareMatrix;

inline std::uint64_t test_seed() {
    if (const char* env = std::getenv("SLNGEO_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
    }
    return 20250809ULL;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(test_seed());
    return engine;
}

inline SquareMatrix random_gaussian(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> dist(0.0, 1.0);
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = dist(gen);
    return m;
}

/// Haar-ish random rotation: Gram-Schmidt on a Gaussian matrix (run twice
/// for numerical orthogonality), orientation fixed to det +1.
inline SquareMatrix random_rotation(int n, std::mt19937_64& gen) {
    SquareMatrix q = random_gaussian(n, gen);
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < j; ++k) {
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += q(i, j) * q(i, k);
                for (int i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
            }
            double norm = 0.0;
            for (int i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
            norm = std::sqrt(norm);
            for (int i = 0; i < n; ++i) q(i, j) /= norm;
        }
    }
    if (slngeo::determinant(q) < 0.0)
        for (int i = 0; i < n; ++i) q(i, 0) = -q(i, 0);
    return q;
}

/// Random unit-determinant matrix with singular values exp(u), u uniform in
/// [-spread, spread] recentred to sum zero; well conditioned by design.
inline SquareMatrix random_sl(int n, std::mt19937_64& gen, double spread = 0.2) {
    std::uniform_real_distribution<double> dist(-spread, spread);
    std::vector<double> u(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (auto& v : u) { v = dist(gen); sum += v; }
    for (auto& v : u) v = std::exp(v - sum / n);
    const SquareMatrix left = random_rotation(n, gen);
    const SquareMatrix right = random_rotation(n, gen);
    return left * SquareMatrix::diagonal(u) * right.transpose();
}

/// Random tangent matrix at A with HS norm `scale`.
inline SquareMatrix random_tangent(const GroupPoint& a, std::mt19937_64& gen, double scale = 0.25) {
    SquareMatrix v = slngeo::project_to_tangent(a, random_gaussian(a.dim(), gen));
    return v * (scale / slngeo::hs_norm(v));
}

/// Strictly upper triangular entries uniform in [-1, 1], conjugated by a
/// random rotation (which reaches every nilpotent up to rotation).
inline SquareMatrix random_nilpotent(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m(i, j) = dist(gen);
    const SquareMatrix o = random_rotation(n, gen);
    return o * m * o.transpose();
}

/// Central difference d/dt f(t) with the step used by the curvature oracles.
inline SquareMatrix fd_derivative(const std::function<SquareMatrix(double)>& f, double t,
                                  double h = 1e-5) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

inline SquareMatrix fd_second_derivative(const std::function<SquareMatrix(double)>& f, double t,
                                         double h = 1e-5) {
    return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations; plenty for
/// the small signature checks.
inline std::vector<double> symmetric_eigenvalues(SquareMatrix a) {
    const int n = a.dim();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a(i, i);
    return eig;
}

}  // namespace slntest
