#pragma once

// Independent mode-system oracle: assembles the raw 3x3 rows of the per-mode
// boundary conditions and solves them by Cramer's rule in extended precision.
// Deliberately shares no code with eitscan::solve_mode, which uses a
// closed-form elimination; the two paths cross-check each other in tests.

#include <cmath>

#include "eitscan/disk_forward.hpp"
#include "eitscan/errors.hpp"

namespace eitscan::verify {

namespace detail {

inline long double det3(const long double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

} // namespace detail

inline ModeCoefficients symbolic_mode_solve(int n, const MediumConfig& medium) {
    medium.validate();
    const int m = std::abs(n);
    const long double so = medium.sigma_out;
    const long double si = medium.sigma_in;
    const long double g = medium.gamma;
    const long double rho = medium.rho;

    long double a[3][3];
    if (m == 0) {
        a[0][0] = 1.0L; a[0][1] = so;                a[0][2] = 0.0L;
        a[1][0] = 1.0L; a[1][1] = std::log(rho);     a[1][2] = -1.0L;
        a[2][0] = 0.0L; a[2][1] = so / rho;          a[2][2] = -g;
    } else {
        const long double rp = std::pow(rho, static_cast<long double>(m));
        const long double rm = std::pow(rho, static_cast<long double>(-m));
        a[0][0] = so * m + 1.0L;        a[0][1] = 1.0L - so * m;          a[0][2] = 0.0L;
        a[1][0] = rp;                   a[1][1] = rm;                     a[1][2] = -rp;
        a[2][0] = so * m * rp / rho;    a[2][1] = -so * m * rm / rho;     a[2][2] = -(si * m * rp / rho + g * rp);
    }

    const long double det = detail::det3(a);
    // magnitude of the largest expansion term, for the singularity check
    long double scale = 0.0L;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                if (i != j && j != k && i != k)
                    scale = std::max(scale, std::abs(a[0][i] * a[1][j] * a[2][k]));
    if (!(std::abs(det) > 1e-18L * scale))
        throw numerical_error("symbolic_mode_solve: singular mode system for n = " + std::to_string(n));

    ModeCoefficients out;
    out.n = n;
    long double col[3];
    for (int c = 0; c < 3; ++c) {
        long double b[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                b[i][j] = j == c ? (i == 0 ? 1.0L : 0.0L) : a[i][j];
        col[c] = detail::det3(b) / det;
    }
    out.alpha = static_cast<double>(col[0]);
    out.beta = static_cast<double>(col[1]);
    out.omega = static_cast<double>(col[2]);
    return out;
}

} // namespace eitscan::verify
