#pragma once

// LSM and RFM imaging functionals over a Cartesian sampling grid.
//   W_LSM(z) = 1 / ||f_alpha^z||_2 with A^delta f^z = b_z solved by a
//              filtered-SVD scheme;
//   W_RFM(z) = [ sum_n phi_alpha^2(s_n)/s_n |<u_n, b_z>|^2 ]^{-1}.
// Both are large inside the interface and small outside; maps are displayed
// after sup-normalization. Points whose indicator degenerates to infinity
// (zero solution norm / empty weighted sum) are flagged, excluded from the
// sup, and reported.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eitscan/disk_forward.hpp"
#include "eitscan/errors.hpp"
#include "eitscan/greens_trace.hpp"
#include "eitscan/regularize.hpp"

namespace eitscan {

struct GridPoint {
    double x = 0.0;
    double y = 0.0;
    double rho = 0.0;
    double theta = 0.0;
    int ix = 0;  // column index in the full raster
    int iy = 0;  // row index (0 = top, y = +1)
};

// Cartesian lattice over [-1,1]^2 masked to rho_z <= r_max. Points are stored
// row-major from the top row so map exports are reproducible.
struct ImagingGrid {
    int resolution = 0;
    double r_max = kSamplingRadiusMax;
    std::vector<GridPoint> points;

    static ImagingGrid cartesian(int resolution, double r_max = kSamplingRadiusMax) {
        if (resolution < 2) throw config_error("ImagingGrid: resolution must be >= 2");
        if (!(r_max > 0.0 && r_max < 1.0)) throw config_error("ImagingGrid: r_max must lie in (0,1)");
        ImagingGrid g;
        g.resolution = resolution;
        g.r_max = r_max;
        const double step = 2.0 / (resolution - 1);
        for (int iy = 0; iy < resolution; ++iy) {
            const double y = 1.0 - step * iy;
            for (int ix = 0; ix < resolution; ++ix) {
                const double x = -1.0 + step * ix;
                const double r = std::hypot(x, y);
                if (r <= r_max)
                    g.points.push_back({x, y, r, std::atan2(y, x), ix, iy});
            }
        }
        return g;
    }

    double spacing() const { return 2.0 / (resolution - 1); }
};

enum class ImagingMethod { lsm, rfm };

inline std::string to_string(ImagingMethod m) {
    return m == ImagingMethod::lsm ? "lsm" : "rfm";
}

struct IndicatorMap {
    ImagingGrid grid;
    std::vector<double> values;   // one per grid point; flagged entries are placeholders
    std::vector<std::uint8_t> flags;  // 1 = degenerate (infinite indicator)
    ImagingMethod method = ImagingMethod::lsm;
    FilterSpec filter;
    bool normalized = false;

    int flagged_count() const {
        return static_cast<int>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
    }
};

namespace detail {

inline Eigen::VectorXd trace_vector(const GridPoint& p, double sigma, const BoundaryGrid& grid) {
    const GreensTrace t = robin_greens_trace(SamplingPoint{p.rho, p.theta}, sigma, grid);
    return Eigen::Map<const Eigen::VectorXd>(t.values.data(),
                                             static_cast<Eigen::Index>(t.values.size()));
}

} // namespace detail

// Raw (unnormalized) LSM indicator at one sampling point; returns false when
// the solution norm vanishes and the point must be flagged.
inline bool lsm_value(const OperatorMatrix& a, const SpectralSystem& sys, const GridPoint& p,
                      double sigma, const FilterSpec& spec, double& out) {
    const Eigen::VectorXd b = detail::trace_vector(p, sigma, a.grid);
    const Eigen::VectorXd f = spec.scheme == FilterScheme::ttls ? ttls_solve(a.entries, b, spec.k)
                                                                : filtered_solve(sys, b, spec);
    const double nrm = f.norm();
    if (!(nrm > 0.0)) return false;
    out = 1.0 / nrm;
    return true;
}

// Raw RFM indicator at one sampling point (inverted filtered Picard sum);
// returns false when the weighted sum is empty.
inline bool rfm_value(const SpectralSystem& sys, const Eigen::MatrixXd& a_entries,
                      const BoundaryGrid& grid, const GridPoint& p, double sigma,
                      const FilterSpec& spec, double& out, int* guard_hits = nullptr) {
    const Eigen::VectorXd b = detail::trace_vector(p, sigma, grid);
    AugmentedSpectrum aug;
    if (spec.scheme == FilterScheme::ttls) aug = augmented_decompose(a_entries, b);

    double acc = 0.0;
    for (int i = 0; i < sys.size(); ++i) {
        const double s = sys.singular_values(i);
        const double phi = spec.scheme == FilterScheme::ttls
                               ? filter_value(spec, s, &aug, guard_hits)
                               : filter_value(spec, s);
        const double c = sys.left_vectors.col(i).dot(b);
        acc += phi * phi / s * c * c;
    }
    if (!(acc > 0.0)) return false;
    out = 1.0 / acc;
    return true;
}

inline IndicatorMap lsm_indicator(const OperatorMatrix& a, const ImagingGrid& grid, double sigma,
                                  const FilterSpec& spec) {
    if (grid.points.empty()) throw config_error("lsm_indicator: empty imaging grid");
    const SpectralSystem sys = decompose(a);
    if (sys.size() == 0) throw numerical_error("lsm_indicator: zero operator");

    IndicatorMap map;
    map.grid = grid;
    map.method = ImagingMethod::lsm;
    map.filter = spec;
    map.values.resize(grid.points.size(), 0.0);
    map.flags.resize(grid.points.size(), 0);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        double w = 0.0;
        if (lsm_value(a, sys, grid.points[i], sigma, spec, w))
            map.values[i] = w;
        else
            map.flags[i] = 1;
    }
    return map;
}

// The TTLS weighting needs the operator entries to augment with each b_z; they
// are reconstructed from the spectral system (exact up to the trim level).
inline IndicatorMap rfm_indicator(const SpectralSystem& sys, const ImagingGrid& grid, double sigma,
                                  const FilterSpec& spec) {
    if (grid.points.empty()) throw config_error("rfm_indicator: empty imaging grid");
    if (sys.size() == 0) throw numerical_error("rfm_indicator: empty spectrum");
    const BoundaryGrid bgrid = BoundaryGrid::uniform(sys.original_dim);
    Eigen::MatrixXd a_entries;
    if (spec.scheme == FilterScheme::ttls) a_entries = sys.reconstruct();

    IndicatorMap map;
    map.grid = grid;
    map.method = ImagingMethod::rfm;
    map.filter = spec;
    map.values.resize(grid.points.size(), 0.0);
    map.flags.resize(grid.points.size(), 0);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        double w = 0.0;
        if (rfm_value(sys, a_entries, bgrid, grid.points[i], sigma, spec, w))
            map.values[i] = w;
        else
            map.flags[i] = 1;
    }
    return map;
}

// Divide by the sup over unflagged points; flagged points are set to 1 in the
// output (flag retained) so they can never dominate the display.
inline IndicatorMap normalize_map(const IndicatorMap& map) {
    double sup = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (map.flags[i]) continue;
        if (std::isfinite(map.values[i]) && map.values[i] > 0.0) {
            sup = std::max(sup, map.values[i]);
            any = true;
        }
    }
    if (!any || !(sup > 0.0))
        throw numerical_error("normalize_map: no finite positive values to normalize");

    IndicatorMap out = map;
    out.normalized = true;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = out.flags[i] ? 1.0 : out.values[i] / sup;
    return out;
}

// Discrete quality metrics against the true concentric disk of radius
// truth.rho: interior mean over annulus(0.6..0.9) mean contrast, Jaccard
// index of the tau level set, and the distance of the argmax from the center.
struct ReconMetrics {
    double contrast = 0.0;
    double jaccard = 0.0;
    double argmax_dist = 0.0;
    int flagged = 0;
};

inline ReconMetrics score(const IndicatorMap& map, const MediumConfig& truth, double tau) {
    if (!map.normalized) throw config_error("score: map must be normalized");
    if (!(tau > 0.0 && tau < 1.0)) throw config_error("score: tau must lie in (0,1)");
    truth.validate();

    double sum_in = 0.0, sum_ann = 0.0;
    int n_in = 0, n_ann = 0;
    int n_int = 0, n_uni = 0;
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (map.flags[i]) continue;  // degenerate points carry no information
        const GridPoint& p = map.grid.points[i];
        const double v = map.values[i];
        const bool inside = p.rho <= truth.rho;
        const bool level = v >= tau;
        if (inside) { sum_in += v; ++n_in; }
        if (p.rho >= 0.6 && p.rho <= 0.9) { sum_ann += v; ++n_ann; }
        if (level && inside) ++n_int;
        if (level || inside) ++n_uni;
        // ties broken toward the center so a plateau map localizes sensibly
        if (v > best || (v == best && p.rho < map.grid.points[best_i].rho)) {
            best = v;
            best_i = i;
        }
    }
    if (n_in == 0 || n_ann == 0)
        throw config_error("score: grid does not cover the interior/annulus regions");

    ReconMetrics m;
    m.flagged = map.flagged_count();
    m.contrast = (sum_in / n_in) / (sum_ann / n_ann);
    m.jaccard = n_uni > 0 ? static_cast<double>(n_int) / n_uni : 0.0;
    const GridPoint& am = map.grid.points[best_i];
    m.argmax_dist = std::hypot(am.x, am.y);
    return m;
}

} // namespace eitscan
