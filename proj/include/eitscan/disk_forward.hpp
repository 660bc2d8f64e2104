#pragma once

// Forward model on the unit disk: a concentric circular interface at r = rho
// carries a Robin transmission condition [[sigma du/dr]] = gamma * u, the outer
// circle r = 1 carries the impedance condition sigma du/dr + u = f, and the
// measured data is the trace gap u - u0 on r = 1. Separation of variables
// reduces the problem to one 3x3 linear system per Fourier mode; the gap
// operator becomes a convolution kernel in the angle difference, discretized
// with the periodic trapezoid rule on N equispaced collocation angles.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "eitscan/errors.hpp"

namespace eitscan {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Geometry and physics of the disk problem.
struct MediumConfig {
    double rho = 0.4;        // radius of the interior interface, in (0,1)
    double sigma_out = 1.0;  // background conductivity (annulus and u0)
    double sigma_in = 1.0;   // conductivity inside the interface
    double gamma = 1.0;      // Robin transmission parameter, >= 0

    void validate() const {
        if (!(rho > 0.0 && rho < 1.0))
            throw config_error("MediumConfig: rho must lie in (0,1), got " + std::to_string(rho));
        if (!(sigma_out > 0.0))
            throw config_error("MediumConfig: sigma_out must be positive");
        if (!(sigma_in > 0.0))
            throw config_error("MediumConfig: sigma_in must be positive");
        if (!(gamma >= 0.0))
            throw config_error("MediumConfig: gamma must be nonnegative");
    }
};

// Per-mode response factors: the mode-n solution driven by a unit Fourier
// coefficient f_n is  a_n = alpha * f_n,  b_n = beta * f_n,  c_n = omega * f_n,
// where (a, b) are the r^{|n|}, r^{-|n|} amplitudes in the annulus (b the
// log-amplitude for n = 0) and c the amplitude inside the interface.
struct ModeCoefficients {
    int n = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double omega = 0.0;
};

// N equispaced collocation angles phi_j = 2*pi*j/N on [0, 2*pi).
struct BoundaryGrid {
    int n_points = 0;
    std::vector<double> angles;

    static BoundaryGrid uniform(int n) {
        if (n < 1) throw config_error("BoundaryGrid: n_points must be positive");
        BoundaryGrid g;
        g.n_points = n;
        g.angles.resize(static_cast<std::size_t>(n));
        const double h = kTwoPi / n;
        for (int j = 0; j < n; ++j) g.angles[static_cast<std::size_t>(j)] = h * j;
        return g;
    }
};

// Series truncation |n| <= truncation_order for the gap kernel.
struct KernelSpec {
    int truncation_order = 10;

    void validate() const {
        if (truncation_order < 1)
            throw config_error("KernelSpec: truncation_order must be >= 1");
    }
};

// Discretized gap operator A (and its noisy variant A^delta).
struct OperatorMatrix {
    Eigen::MatrixXd entries;
    BoundaryGrid grid;
    double noise_level = 0.0;
    std::optional<std::uint64_t> seed;
};

namespace detail {

// Cancellation guard for the mode-system denominators. The systems are
// provably nonsingular for admissible media, so the only way to lose the
// solve is catastrophic cancellation; flagging |sum| <= 1e-14 * (sum of
// term magnitudes) is the closed-form analogue of cond > 1e14.
inline void check_denominator(double value, double magnitude, int n) {
    if (!(std::abs(value) > 1e-14 * magnitude) || !std::isfinite(value))
        throw numerical_error("solve_mode: degenerate 3x3 mode system for mode n = " + std::to_string(n));
}

} // namespace detail

// Solve the 3x3 mode system for |n| = m. The rows come straight from the
// boundary conditions applied to the ansatz:
//   annulus   u = a r^m + b r^{-m}   (a + b ln r for m = 0),
//   interior  u = c r^m,
// namely (1) sigma_out u'(1) + u(1) = 1, (2) u continuous at rho,
// (3) sigma_out u'(rho+) - sigma_in u'(rho-) = gamma u(rho).
// Eliminating c = a + b rho^{-2m} and then a gives, with
//   P = m (sigma_out - sigma_in) - gamma rho,
//   Q = m (sigma_out + sigma_in) + gamma rho,   s = rho^{2m},
//   D = (sigma_out m + 1) Q + (1 - sigma_out m) P s:
//   a = Q / D,  b = P s / D,  c = 2 sigma_out m / D.
// This form stays O(1) for every admissible input; solving the raw matrix
// instead would face condition numbers of order rho^{-2m}.
inline ModeCoefficients solve_mode(int n, const MediumConfig& medium) {
    medium.validate();
    const int m = std::abs(n);
    const double so = medium.sigma_out;
    const double si = medium.sigma_in;
    const double g = medium.gamma;
    const double rho = medium.rho;

    ModeCoefficients out;
    out.n = n;
    if (m == 0) {
        // a + sigma b = 1;  a + b ln(rho) = c;  sigma b / rho = gamma c.
        const double d0 = so + g * rho * (so - std::log(rho));
        detail::check_denominator(d0, so + g * rho * (so + std::abs(std::log(rho))), n);
        out.beta = g * rho / d0;
        out.alpha = 1.0 - so * out.beta;
        out.omega = so / d0;
        return out;
    }
    const double p = m * (so - si) - g * rho;
    const double q = m * (so + si) + g * rho;
    const double s = std::pow(rho, 2 * m);
    const double t1 = (so * m + 1.0) * q;
    const double t2 = (1.0 - so * m) * p * s;
    const double d = t1 + t2;
    detail::check_denominator(d, std::abs(t1) + std::abs(t2), n);
    out.alpha = q / d;
    out.beta = p * s / d;
    out.omega = 2.0 * so * m / d;
    return out;
}

// Gap-kernel coefficient: the trace of the mode solution minus the background
// mode trace. For m >= 1 this is alpha + beta - 1/(sigma_out m + 1), which
// simplifies to the cancellation-free product below; for m = 0 it is
// alpha_0 - 1 = -sigma_out gamma rho / D0. Vanishes identically (and in exact
// floating point) when gamma = 0 and sigma_in = sigma_out.
inline double kernel_coefficient(int n, const MediumConfig& medium) {
    medium.validate();
    const int m = std::abs(n);
    const double so = medium.sigma_out;
    const double si = medium.sigma_in;
    const double g = medium.gamma;
    const double rho = medium.rho;

    if (m == 0) {
        const double d0 = so + g * rho * (so - std::log(rho));
        detail::check_denominator(d0, so + g * rho * (so + std::abs(std::log(rho))), n);
        return -so * g * rho / d0;
    }
    const double p = m * (so - si) - g * rho;
    const double q = m * (so + si) + g * rho;
    const double s = std::pow(rho, 2 * m);
    const double t1 = (so * m + 1.0) * q;
    const double t2 = (1.0 - so * m) * p * s;
    const double d = t1 + t2;
    detail::check_denominator(d, std::abs(t1) + std::abs(t2), n);
    return 2.0 * so * m * p * s / ((so * m + 1.0) * d);
}

// A[i][j] = (1/N) K(phi_i, phi_j) with
//   K(phi, phi') = k0 + 2 sum_{m=1}^{n_max} k_m cos(m (phi - phi')),
// the real cosine pairing of the +-n kernel terms; the 1/(2*pi) kernel
// prefactor and the 2*pi/N trapezoid weight combine to 1/N.
inline OperatorMatrix assemble_operator(const MediumConfig& medium,
                                        const BoundaryGrid& grid,
                                        const KernelSpec& kernel) {
    medium.validate();
    kernel.validate();
    if (grid.n_points < 1 || static_cast<int>(grid.angles.size()) != grid.n_points)
        throw config_error("assemble_operator: invalid boundary grid");

    const int n = grid.n_points;
    const int n_max = kernel.truncation_order;
    std::vector<double> coeff(static_cast<std::size_t>(n_max) + 1);
    for (int m = 0; m <= n_max; ++m)
        coeff[static_cast<std::size_t>(m)] = kernel_coefficient(m, medium);

    OperatorMatrix op;
    op.grid = grid;
    op.entries.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double lam = grid.angles[static_cast<std::size_t>(i)] - grid.angles[static_cast<std::size_t>(j)];
            double k = coeff[0];
            for (int m = 1; m <= n_max; ++m)
                k += 2.0 * coeff[static_cast<std::size_t>(m)] * std::cos(m * lam);
            op.entries(i, j) = k / n;
        }
    }
    return op;
}

namespace detail {

// Uniform double in [0,1) from the top 53 bits of a mt19937_64 draw.
// std::uniform_real_distribution is not bit-portable across standard
// libraries; this mapping is.
inline double canonical_u53(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

} // namespace detail

// Multiplicative noise model: A^delta_ij = A_ij (1 + delta E_ij) with E drawn
// i.i.d. uniform on [-1,1] and rescaled so that ||E||_2 = 1. Deterministic for
// a fixed seed (row-major draw order, mt19937_64). The bound
// ||A^delta - A||_2 <= delta ||A||_2 holds because the Hadamard product is a
// submatrix of the Kronecker product; it is re-checked numerically anyway.
inline OperatorMatrix apply_noise(const OperatorMatrix& a, double delta, std::uint64_t seed) {
    if (delta < 0.0) throw config_error("apply_noise: delta must be nonnegative");
    OperatorMatrix out = a;
    out.noise_level = delta;
    out.seed = seed;
    if (delta == 0.0) return out;  // entries bit-identical

    const Eigen::Index n = a.entries.rows();
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd e(n, a.entries.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < a.entries.cols(); ++j)
            e(i, j) = 2.0 * detail::canonical_u53(gen) - 1.0;
    const double enorm = detail::spectral_norm(e);
    if (!(enorm > 0.0)) throw numerical_error("apply_noise: degenerate noise draw");
    e /= enorm;

    out.entries = a.entries.cwiseProduct(Eigen::MatrixXd::Constant(n, n, 1.0) + delta * e);

    const double gap = detail::spectral_norm(out.entries - a.entries);
    const double base = detail::spectral_norm(a.entries);
    if (gap > delta * base * (1.0 + 1e-12))
        throw numerical_error("apply_noise: noise normalization violated the relative bound");
    return out;
}

// Complex Fourier coefficients f_n for |n| <= n_max (index n + n_max).
struct FourierData {
    std::vector<std::complex<double>> coeff;

    explicit FourierData(int n_max = 0)
        : coeff(static_cast<std::size_t>(2 * n_max + 1), std::complex<double>(0.0, 0.0)) {}

    int n_max() const { return (static_cast<int>(coeff.size()) - 1) / 2; }

    std::complex<double>& at(int n) { return coeff[static_cast<std::size_t>(n + n_max())]; }
    const std::complex<double>& at(int n) const { return coeff[static_cast<std::size_t>(n + n_max())]; }

    std::complex<double> evaluate(double phi) const {
        std::complex<double> s(0.0, 0.0);
        const int m = n_max();
        for (int n = -m; n <= m; ++n)
            s += at(n) * std::exp(std::complex<double>(0.0, n * phi));
        return s;
    }
};

enum class PotentialBranch { automatic, annulus, inclusion };

// Evaluate the truncated series solution u(r, phi) built from solve_mode.
// The annulus branch is a r^{|n|} + b r^{-|n|} (a + b ln r for n = 0), the
// inclusion branch c r^{|n|}; `branch` lets residual tests probe one side of
// the interface explicitly.
inline std::complex<double> evaluate_potential(double r, double phi, const MediumConfig& medium,
                                               const FourierData& f, const KernelSpec& kernel,
                                               PotentialBranch branch = PotentialBranch::automatic) {
    if (!(r >= 0.0 && r <= 1.0))
        throw config_error("evaluate_potential: r must lie in [0,1]");
    medium.validate();
    kernel.validate();
    const int n_max = std::min(kernel.truncation_order, f.n_max());
    const bool annulus = branch == PotentialBranch::annulus ||
                         (branch == PotentialBranch::automatic && r >= medium.rho);
    if (annulus && r <= 0.0)
        throw config_error("evaluate_potential: annulus branch is singular at r = 0");

    std::complex<double> u(0.0, 0.0);
    for (int m = 0; m <= n_max; ++m) {
        const ModeCoefficients mc = solve_mode(m, medium);
        double radial;
        if (annulus)
            radial = (m == 0) ? mc.alpha + mc.beta * std::log(r)
                              : mc.alpha * std::pow(r, m) + mc.beta * std::pow(r, -m);
        else
            radial = (m == 0) ? mc.omega : mc.omega * std::pow(r, m);
        if (m == 0) {
            u += radial * f.at(0);
        } else {
            u += radial * (f.at(m) * std::exp(std::complex<double>(0.0, m * phi)) +
                           f.at(-m) * std::exp(std::complex<double>(0.0, -m * phi)));
        }
    }
    return u;
}

// Analytic radial derivative of the same truncated series; companion of
// evaluate_potential for boundary-condition residual checks.
inline std::complex<double> evaluate_potential_dr(double r, double phi, const MediumConfig& medium,
                                                  const FourierData& f, const KernelSpec& kernel,
                                                  PotentialBranch branch = PotentialBranch::automatic) {
    if (!(r >= 0.0 && r <= 1.0))
        throw config_error("evaluate_potential_dr: r must lie in [0,1]");
    medium.validate();
    kernel.validate();
    const int n_max = std::min(kernel.truncation_order, f.n_max());
    const bool annulus = branch == PotentialBranch::annulus ||
                         (branch == PotentialBranch::automatic && r >= medium.rho);
    if (annulus && r <= 0.0)
        throw config_error("evaluate_potential_dr: annulus branch is singular at r = 0");

    std::complex<double> du(0.0, 0.0);
    for (int m = 0; m <= n_max; ++m) {
        const ModeCoefficients mc = solve_mode(m, medium);
        double radial;
        if (annulus)
            radial = (m == 0) ? mc.beta / r
                              : m * (mc.alpha * std::pow(r, m - 1) - mc.beta * std::pow(r, -m - 1));
        else
            radial = (m == 0) ? 0.0 : mc.omega * m * std::pow(r, m - 1);
        if (m == 0) {
            du += radial * f.at(0);
        } else {
            du += radial * (f.at(m) * std::exp(std::complex<double>(0.0, m * phi)) +
                            f.at(-m) * std::exp(std::complex<double>(0.0, -m * phi)));
        }
    }
    return du;
}

} // namespace eitscan
