#pragma once

// Boundary trace of the Robin Green's function on the unit disk. For a
// sampling point z = (rho_z, theta_z) the trace at boundary angle phi is
//   G(phi, z) = 1/(2*pi) * int_0^1 s^{1/sigma - 1} P(rho_z s, theta_z - phi) ds,
// with P the Poisson kernel; the Dirichlet part of the Green's function
// vanishes on the circle. Two independent evaluation paths are provided:
// Gauss-Legendre quadrature after the substitution s = tau^sigma (which turns
// the integrand analytic), and termwise integration of the Poisson series.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "eitscan/disk_forward.hpp"
#include "eitscan/errors.hpp"

namespace eitscan {

inline constexpr double kSamplingRadiusMax = 0.95;

// Interior sampling point in polar coordinates.
struct SamplingPoint {
    double rho_z = 0.0;
    double theta_z = 0.0;

    void validate(double r_max = kSamplingRadiusMax) const {
        if (!(rho_z >= 0.0 && rho_z <= r_max))
            throw config_error("SamplingPoint: rho_z must lie in [0, " + std::to_string(r_max) + "]");
    }
};

// Trace vector b_z with its provenance; truncation_bound is nonzero only for
// the series path.
struct GreensTrace {
    std::vector<double> values;
    SamplingPoint point;
    double sigma = 1.0;
    double truncation_bound = 0.0;
};

// Poisson kernel P(t, lambda) = (1 - t^2) / (1 - 2 t cos(lambda) + t^2).
inline double poisson_kernel(double t, double lambda) {
    if (!(t >= 0.0 && t < 1.0))
        throw config_error("poisson_kernel: t must lie in [0,1)");
    const double d = 1.0 - 2.0 * t * std::cos(lambda) + t * t;
    return (1.0 - t * t) / d;
}

namespace detail {

// 64-node Gauss-Legendre rule on [0,1], computed once by Newton iteration on
// the Legendre recurrence.
struct GaussLegendre64 {
    std::array<double, 64> nodes{};
    std::array<double, 64> weights{};

    GaussLegendre64() {
        constexpr int n = 64;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1,1] -> [0,1]
            nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
            nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
            weights[static_cast<std::size_t>(i)] = 0.5 * w;
            weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
        }
    }
};

inline const GaussLegendre64& gl64() {
    static const GaussLegendre64 rule;
    return rule;
}

} // namespace detail

// Quadrature path. The substitution s = tau^sigma gives
//   G(phi, z) = sigma/(2*pi) * int_0^1 P(rho_z tau^sigma, theta_z - phi) dtau,
// whose integrand is analytic on [0,1] for rho_z <= 0.95.
inline GreensTrace robin_greens_trace(const SamplingPoint& z, double sigma, const BoundaryGrid& grid) {
    if (!(sigma > 0.0)) throw config_error("robin_greens_trace: sigma must be positive");
    z.validate();
    const auto& rule = detail::gl64();

    GreensTrace out;
    out.point = z;
    out.sigma = sigma;
    out.values.resize(static_cast<std::size_t>(grid.n_points));
    for (int j = 0; j < grid.n_points; ++j) {
        const double lam = z.theta_z - grid.angles[static_cast<std::size_t>(j)];
        double acc = 0.0;
        for (int q = 0; q < 64; ++q) {
            const double t = z.rho_z * std::pow(rule.nodes[static_cast<std::size_t>(q)], sigma);
            acc += rule.weights[static_cast<std::size_t>(q)] * poisson_kernel(t, lam);
        }
        out.values[static_cast<std::size_t>(j)] = sigma / kTwoPi * acc;
    }
    return out;
}

// Series path (independent oracle): expanding the Poisson kernel and
// integrating termwise gives
//   G(phi, z) = 1/(2*pi) sum_n sigma rho_z^{|n|} e^{i n lambda} / (1 + sigma |n|).
// The reported truncation bound majorizes the dropped |n| > n_max tail.
inline GreensTrace greens_trace_series(const SamplingPoint& z, double sigma,
                                       const BoundaryGrid& grid, int n_max) {
    if (!(sigma > 0.0)) throw config_error("greens_trace_series: sigma must be positive");
    if (n_max < 0) throw config_error("greens_trace_series: n_max must be nonnegative");
    z.validate();

    GreensTrace out;
    out.point = z;
    out.sigma = sigma;
    out.values.assign(static_cast<std::size_t>(grid.n_points), sigma / kTwoPi);
    for (int j = 0; j < grid.n_points; ++j) {
        const double lam = z.theta_z - grid.angles[static_cast<std::size_t>(j)];
        double acc = 0.0;
        for (int m = 1; m <= n_max; ++m)
            acc += std::pow(z.rho_z, m) * std::cos(m * lam) / (1.0 + sigma * m);
        out.values[static_cast<std::size_t>(j)] += sigma / kPi * acc;
    }
    if (z.rho_z > 0.0 && z.rho_z < 1.0)
        out.truncation_bound = sigma / kPi * std::pow(z.rho_z, n_max + 1) /
                               ((1.0 + sigma * (n_max + 1)) * (1.0 - z.rho_z));
    return out;
}

} // namespace eitscan
