#pragma once

// Shared helpers for the unit and acceptance suites.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "eitscan/disk_forward.hpp"
#include "eitscan/greens_trace.hpp"

namespace eitscan::testing {

inline MediumConfig reference_medium() { return MediumConfig{0.4, 1.0, 1.0, 1.0}; }
inline MediumConfig contrast_medium() { return MediumConfig{0.4, 1.0, 10.0, 1.0}; }
inline MediumConfig small_target_medium() { return MediumConfig{0.1, 1.0, 1.0, 1.0}; }

inline double uniform_pm1(std::mt19937_64& gen) {
    return 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
}

// Random real-valued band-limited boundary data (Hermitian coefficients).
inline FourierData random_real_data(int n_max, std::mt19937_64& gen) {
    FourierData f(n_max);
    f.at(0) = uniform_pm1(gen);
    for (int n = 1; n <= n_max; ++n) {
        const std::complex<double> c(uniform_pm1(gen), uniform_pm1(gen));
        f.at(n) = c;
        f.at(-n) = std::conj(c);
    }
    return f;
}

struct BoundaryResiduals {
    double robin = 0.0;
    double continuity = 0.0;
    double jump = 0.0;

    double worst() const { return std::max({robin, continuity, jump}); }
};

// Relative residuals of the three boundary conditions for the truncated
// series solution, evaluated with the analytic radial derivative on a
// uniform angle grid.
inline BoundaryResiduals boundary_residuals(const MediumConfig& medium, const FourierData& f,
                                            int n_angles = 64) {
    const KernelSpec kernel{f.n_max()};
    BoundaryResiduals out;
    double robin_scale = 0.0, cont_scale = 0.0, jump_scale = 0.0;
    for (int j = 0; j < n_angles; ++j) {
        const double phi = kTwoPi * j / n_angles;

        const std::complex<double> u1 = evaluate_potential(1.0, phi, medium, f, kernel);
        const std::complex<double> du1 = evaluate_potential_dr(1.0, phi, medium, f, kernel);
        const std::complex<double> fv = f.evaluate(phi);
        out.robin = std::max(out.robin, std::abs(medium.sigma_out * du1 + u1 - fv));
        robin_scale = std::max(robin_scale,
                               std::abs(medium.sigma_out * du1) + std::abs(u1) + std::abs(fv));

        const std::complex<double> up = evaluate_potential(medium.rho, phi, medium, f, kernel,
                                                           PotentialBranch::annulus);
        const std::complex<double> um = evaluate_potential(medium.rho, phi, medium, f, kernel,
                                                           PotentialBranch::inclusion);
        out.continuity = std::max(out.continuity, std::abs(up - um));
        cont_scale = std::max(cont_scale, std::abs(up) + std::abs(um));

        const std::complex<double> dup = evaluate_potential_dr(medium.rho, phi, medium, f, kernel,
                                                               PotentialBranch::annulus);
        const std::complex<double> dum = evaluate_potential_dr(medium.rho, phi, medium, f, kernel,
                                                               PotentialBranch::inclusion);
        const std::complex<double> jr =
            medium.sigma_out * dup - medium.sigma_in * dum - medium.gamma * um;
        out.jump = std::max(out.jump, std::abs(jr));
        jump_scale = std::max(jump_scale, std::abs(medium.sigma_out * dup) +
                                              std::abs(medium.sigma_in * dum) +
                                              std::abs(medium.gamma * um));
    }
    if (robin_scale > 0.0) out.robin /= robin_scale;
    if (cont_scale > 0.0) out.continuity /= cont_scale;
    if (jump_scale > 0.0) out.jump /= jump_scale;
    return out;
}

} // namespace eitscan::testing
