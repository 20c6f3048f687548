#pragma once

#include <optional>
#include <vector>

#include "slngeo/integrate.hpp"
#include "slngeo/state.hpp"

namespace slngeo {

enum class BlockParity { Even, Odd };

/// Coordinates of a block-diagonal radial state: m 2x2 blocks spanned by
/// {I2, K2, S2} for beta/omega and Z2 for zeta, plus a trailing scalar block
/// (b_inf, w_inf) when the dimension is odd. z is constant in time.
struct BlockState {
    int m = 0;
    BlockParity parity = BlockParity::Even;
    std::vector<double> b0, b1, b2;  // beta components, length m
    std::vector<double> w0, w1, w2;  // omega components, length m
    std::vector<double> z;           // angular momenta, length m
    double b_inf = 0.0;              // odd parity only
    double w_inf = 0.0;

    int dim() const { return parity == BlockParity::Even ? 2 * m : 2 * m + 1; }

    /// Throws InvariantError unless every block is positive definite
    /// (b0 > sqrt(b1^2+b2^2)), det(beta) = 1 within 1e-9 and the
    /// compatibility sum b0.w0 + b1.w1 + b2.w2 (+ 1/2 b_inf w_inf) vanishes
    /// within 1e-9.
    void validate() const;
};

/// Time derivatives of the dynamic components (z is conserved).
struct BlockDerivative {
    std::vector<double> b0, b1, b2, w0, w1, w2;
    double b_inf = 0.0, w_inf = 0.0;
};

/// Assemble the full (beta, omega, zeta) matrices from block coordinates.
ReducedState embed(const BlockState& s);

/// Inverse of embed; reads the block components off the matrices.
BlockState extract(const ReducedState& s, BlockParity parity);

/// Closed-form block right-hand side from the per-block products plus the
/// global trace terms; agrees with embed-then-reduced_rhs to roundoff.
BlockDerivative block_rhs(const BlockState& s);

/// The text's conserved energy 1/2 tr((zeta^T+omega) beta (omega+zeta))
/// evaluated in block coordinates (twice the kinetic energy).
double block_energy(const BlockState& s);

enum class BoundednessVerdict { Bounded, Inconclusive };

/// Energy/momentum ceilings per block: z_i^2 (b0_i - sqrt(b1_i^2+b2_i^2))
/// <= E. The Bounded verdict needs even parity, a pure-diagonal state and
/// no vanishing angular momentum.
struct BoundednessReport {
    BoundednessVerdict verdict = BoundednessVerdict::Inconclusive;
    double energy = 0.0;
    std::vector<std::optional<double>> ceilings;  // E / z_i^2 where z_i != 0
    std::vector<int> zero_momentum_blocks;        // potential growth directions
};

BoundednessReport boundedness_verdict(const BlockState& s);

/// One sample of a block-coordinate trajectory.
struct BlockTrajectory {
    std::vector<double> t;
    std::vector<BlockState> states;
    std::vector<double> energy;  // block_energy per sample
    bool truncated = false;
    std::string truncation_reason;
};

/// Integrate the block system directly in its vector coordinates.
BlockTrajectory integrate_block(const BlockState& init, double t_end,
                                const IntegratorOptions& opts = {});

/// State of one of the two-degree-of-freedom reductions (q = lambda or b,
/// p = v).
struct Hamiltonian2DState {
    double q = 0.0;
    double p = 0.0;
};

/// Two-value pulsating reduction: blocks split into a leading group of m0
/// and a trailing group of m - m0, all angular momenta nonzero. Periodic
/// orbits of H(lambda, v) = m0 e^{lambda/m0} z1^2
/// + (m-m0) e^{-lambda/(m-m0)} zm^2
/// + (e^{-lambda/m0}/m0 + e^{lambda/(m-m0)}/(m-m0)) v^2.
class PulseSystem {
public:
    PulseSystem(int m0, int m, double z1, double zm);

    double hamiltonian(double lam, double v) const;
    Hamiltonian2DState rhs(const Hamiltonian2DState& s) const;  // (lam', v')
    double critical_lambda() const;

    std::vector<std::pair<double, Hamiltonian2DState>> integrate(
        const Hamiltonian2DState& init, double t_end, double dt_out = 0.01,
        const IntegratorOptions& opts = {}) const;

    /// Period via Poincare return to the v = 0 section, bisection-refined to
    /// ~1e-10 in time; nullopt when no full return happens before t_max.
    std::optional<double> detect_period(const Hamiltonian2DState& init, double t_max = 200.0) const;

    int m0() const { return m0_; }
    int m() const { return m_; }

private:
    int m0_, m_;
    double z1_, zm_;
};

/// When the block state satisfies the two-group pulsating ansatz, its
/// grouping and mapped 2D coordinates (lambda = m0 ln b0_1,
/// v = m0 b0_1 w0_1).
struct PulseAnsatz {
    int m0 = 0;
    double z1 = 0.0, zm = 0.0;
    Hamiltonian2DState state;
};

std::optional<PulseAnsatz> match_pulse_ansatz(const BlockState& s, double tol = 1e-9);

/// Swirling/shear reduction in dimension n with a leading isotropic group
/// of 2*m0 directions carrying momentum z0 and a trailing group with none:
/// H(b, v) = m0 z0^2 e^{b/(2m0)}
///         + (e^{-b/(2m0)}/(4 m0) + e^{b/(n-2m0)}/(2n-4m0)) v^2,  b' = -v.
class SwirlSystem {
public:
    SwirlSystem(int n, int m0, double z0);

    double hamiltonian(double b, double v) const;
    Hamiltonian2DState rhs(const Hamiltonian2DState& s) const;

    /// The corresponding block state (n even: m 2x2 blocks; n odd: trailing
    /// scalar block) with beta = e^{b/(2m0)} on the leading group.
    BlockState block_state(double b, double v) const;

    std::vector<std::pair<double, Hamiltonian2DState>> integrate(
        const Hamiltonian2DState& init, double t_end, double dt_out = 0.01,
        const IntegratorOptions& opts = {}) const;

    struct Asymptotics {
        double energy = 0.0;
        double fitted_slope = 0.0;     // least squares on B(t) = e^{-b/(4 m0)}, late window
        double predicted_slope = 0.0;  // 1/2 sqrt(H/m0), z0 != 0 only
        bool monotone = false;         // b strictly monotone, z0 == 0 only
        double b_min = 0.0, b_max = 0.0;
    };

    /// z0 != 0: fit the linear growth of B(t) over the last 20% of [0, t_end]
    /// and compare against 1/2 sqrt(H/m0). z0 == 0: verify strict
    /// monotonicity of b and report the covered range.
    Asymptotics analyze(const Hamiltonian2DState& init, double t_end,
                        const IntegratorOptions& opts = {}) const;

    int n() const { return n_; }
    int m0() const { return m0_; }
    double z0() const { return z0_; }

private:
    int n_, m0_;
    double z0_;
};

/// Contrast an unbounded swirling flow against an arbitrarily small
/// angular-momentum perturbation of it that falls under the boundedness
/// theorem.
struct InstabilityReport {
    double eps = 0.0;
    double unperturbed_growth = 0.0;  // |A|(t_end) / |A|(0)
    BoundednessReport perturbed_verdict;
    double max_ceiling_excess = 0.0;  // max_t,i of z_i^2(b0-sqrt(b1^2+b2^2)) - E
    bool perturbed_within_ceilings = false;
};

InstabilityReport instability_demo(int n, int m0, double eps, double t_end = 100.0,
                                   const IntegratorOptions& opts = {});

/// The three published simulation presets (n = 6, pure diagonal).
BlockState figure_preset(int id);

}  // namespace slngeo
