#pragma once

// Finite-difference oracle for the disk transmission problem, used only by
// tests and the CLI self-check. Second-order differences in polar
// coordinates on a two-zone radial grid aligned to r = rho: standard 5-point
// stencils inside each zone, one-sided second-order stencils for the Robin
// row at r = 1 and for the current-jump row at r = rho, and the exact mean
// value property for the center. Independent of the mode-system code path by
// construction.

#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "eitscan/disk_forward.hpp"
#include "eitscan/errors.hpp"

namespace eitscan::verify {

// n_r radial cells in total (split between the two zones so the interface is
// a mesh line), n_theta angular cells.
struct PolarMesh {
    int n_r = 128;
    int n_theta = 256;
    bool aligned = true;

    void validate() const {
        if (n_r < 8 || n_theta < 8) throw config_error("PolarMesh: mesh too coarse");
        if (!aligned) throw config_error("PolarMesh: interface must lie on a mesh line");
    }
};

// Returns the boundary trace u(1, theta_j), j = 0..n_theta-1, for real-valued
// band-limited boundary data f (imaginary parts of the coefficients are
// ignored when evaluating f on the angular mesh).
inline std::vector<double> fd_forward_solve(const MediumConfig& medium, const FourierData& f,
                                            const PolarMesh& mesh) {
    medium.validate();
    mesh.validate();

    const double rho = medium.rho;
    const double so = medium.sigma_out;
    const double si = medium.sigma_in;
    const double g = medium.gamma;

    // two-zone radial grid: n_in cells on [0, rho], n_out on [rho, 1]
    const int n_in = std::max(2, static_cast<int>(std::lround(rho * mesh.n_r)));
    const int n_out = mesh.n_r - n_in;
    if (n_out < 2) throw config_error("fd_forward_solve: too few cells outside the interface");
    const double h1 = rho / n_in;
    const double h2 = (1.0 - rho) / n_out;

    const int nt = mesh.n_theta;
    const double ht = kTwoPi / nt;
    const int n_unknowns = mesh.n_r * nt + 1;  // +1 for the shared center value
    const auto idx = [nt](int i, int j) {  // i = 1..n_r radial line, j wraps
        return (i - 1) * nt + ((j % nt) + nt) % nt + 1;
    };
    const auto radius = [&](int i) {
        return i <= n_in ? h1 * i : rho + h2 * (i - n_in);
    };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_unknowns) * 5);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknowns);

    // center: u_c equals the mean over the first ring (mean value property,
    // exact for harmonic u and spectrally accurate on the trapezoid mesh)
    trip.emplace_back(0, 0, 1.0);
    for (int j = 0; j < nt; ++j) trip.emplace_back(0, idx(1, j), -1.0 / nt);

    for (int i = 1; i <= mesh.n_r; ++i) {
        const double ri = radius(i);
        const double h = i <= n_in ? h1 : h2;
        for (int j = 0; j < nt; ++j) {
            const int row = idx(i, j);
            if (i == n_in) {
                // jump row: so du/dr|+ - si du/dr|- = gamma u, one-sided
                // second-order stencils on both sides
                trip.emplace_back(row, idx(i, j), -3.0 * so / (2.0 * h2) - 3.0 * si / (2.0 * h1) - g);
                trip.emplace_back(row, idx(i + 1, j), 4.0 * so / (2.0 * h2));
                trip.emplace_back(row, idx(i + 2, j), -so / (2.0 * h2));
                trip.emplace_back(row, idx(i - 1, j), 4.0 * si / (2.0 * h1));
                trip.emplace_back(row, i - 2 >= 1 ? idx(i - 2, j) : 0, -si / (2.0 * h1));
            } else if (i == mesh.n_r) {
                // Robin row at r = 1
                trip.emplace_back(row, idx(i, j), 3.0 * so / (2.0 * h2) + 1.0);
                trip.emplace_back(row, idx(i - 1, j), -4.0 * so / (2.0 * h2));
                trip.emplace_back(row, idx(i - 2, j), so / (2.0 * h2));
                rhs(row) = f.evaluate(ht * j).real();
            } else {
                // u_rr + u_r/r + u_tt/r^2 = 0 (sigma constant within a zone)
                const int inner = i - 1 >= 1 ? idx(i - 1, j) : 0;
                trip.emplace_back(row, idx(i, j), -2.0 / (h * h) - 2.0 / (ht * ht * ri * ri));
                trip.emplace_back(row, idx(i + 1, j), 1.0 / (h * h) + 1.0 / (2.0 * h * ri));
                trip.emplace_back(row, inner, 1.0 / (h * h) - 1.0 / (2.0 * h * ri));
                trip.emplace_back(row, idx(i, j + 1), 1.0 / (ht * ht * ri * ri));
                trip.emplace_back(row, idx(i, j - 1), 1.0 / (ht * ht * ri * ri));
            }
        }
    }

    Eigen::SparseMatrix<double> a(n_unknowns, n_unknowns);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.analyzePattern(a);
    solver.factorize(a);
    if (solver.info() != Eigen::Success)
        throw numerical_error("fd_forward_solve: sparse factorization failed");
    const Eigen::VectorXd u = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw numerical_error("fd_forward_solve: sparse solve failed");

    std::vector<double> trace(static_cast<std::size_t>(nt));
    for (int j = 0; j < nt; ++j)
        trace[static_cast<std::size_t>(j)] = u(idx(mesh.n_r, j));
    return trace;
}

} // namespace eitscan::verify
