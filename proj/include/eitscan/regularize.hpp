#pragma once

// Filtered-SVD solvers for the ill-posed collocation system A^delta f = b_z.
// Supported schemes: Tikhonov (phi = t^2/(t^2 + alpha)), spectral cut-off
// (phi = 1 iff t^2 >= alpha), and truncated total least squares driven by the
// SVD of the augmented matrix [A | b]. TTLS solutions use the pole-free
// closed form; the TTLS filter representation exists for diagnostics and for
// the RFM weighting, with a guard that skips near-pole terms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "eitscan/disk_forward.hpp"
#include "eitscan/errors.hpp"
#include "eitscan/greens_trace.hpp"

namespace eitscan {

// Singular triplets of the data matrix, zeros trimmed. Columns of
// left_vectors/right_vectors are the u_n / v_n.
struct SpectralSystem {
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd left_vectors;
    Eigen::MatrixXd right_vectors;
    int original_dim = 0;

    int size() const { return static_cast<int>(singular_values.size()); }

    Eigen::MatrixXd reconstruct() const {
        if (size() == 0) return Eigen::MatrixXd::Zero(original_dim, original_dim);
        return left_vectors * singular_values.asDiagonal() * right_vectors.transpose();
    }
};

inline constexpr double kSingularValueTrim = 1e-15;  // relative to s_1

// Full SVD of the operator, with numerically zero modes trimmed at
// 1e-15 * s_1.
inline SpectralSystem decompose(const Eigen::MatrixXd& a) {
    if (!a.allFinite()) throw config_error("decompose: matrix has non-finite entries");
    SpectralSystem sys;
    sys.original_dim = static_cast<int>(a.rows());
    if (a.size() == 0) return sys;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double s1 = s.size() > 0 ? s(0) : 0.0;
    int keep = 0;
    while (keep < s.size() && s(keep) > kSingularValueTrim * s1 && s(keep) > 0.0) ++keep;
    sys.singular_values = s.head(keep);
    sys.left_vectors = svd.matrixU().leftCols(keep);
    sys.right_vectors = svd.matrixV().leftCols(keep);
    return sys;
}

inline SpectralSystem decompose(const OperatorMatrix& a) { return decompose(a.entries); }

enum class FilterScheme { tikhonov, spectral_cutoff, ttls };

inline std::string to_string(FilterScheme s) {
    switch (s) {
        case FilterScheme::tikhonov: return "tikhonov";
        case FilterScheme::spectral_cutoff: return "spectral_cutoff";
        case FilterScheme::ttls: return "ttls";
    }
    return "?";
}

// Regularization scheme plus its parameter: real alpha >= 0 for Tikhonov and
// spectral cut-off (alpha = 0 disables the filtering), integer truncation
// index k >= 1 for TTLS (k = number of retained components).
struct FilterSpec {
    FilterScheme scheme = FilterScheme::tikhonov;
    double alpha = 0.0;
    int k = 0;

    static FilterSpec tikhonov(double alpha) { return make_real(FilterScheme::tikhonov, alpha); }
    static FilterSpec spectral_cutoff(double alpha) { return make_real(FilterScheme::spectral_cutoff, alpha); }
    static FilterSpec ttls(int k) {
        if (k < 1) throw config_error("FilterSpec: ttls truncation index must be >= 1");
        FilterSpec f;
        f.scheme = FilterScheme::ttls;
        f.k = k;
        return f;
    }

    std::string label() const {
        if (scheme == FilterScheme::ttls) return "ttls:" + std::to_string(k);
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", alpha);
        return to_string(scheme) + ":" + buf;
    }

private:
    static FilterSpec make_real(FilterScheme s, double alpha) {
        if (!(alpha >= 0.0)) throw config_error("FilterSpec: alpha must be nonnegative");
        FilterSpec f;
        f.scheme = s;
        f.alpha = alpha;
        return f;
    }
};

// SVD of the augmented matrix [A | b]: N singular values (the (N+1)-th is
// zero by rank), the last row of V-bar, and the full V-bar needed by the
// TTLS closed form.
struct AugmentedSpectrum {
    Eigen::VectorXd singular_values;  // length N+1, last entry 0
    Eigen::VectorXd v_last_row;       // length N+1
    Eigen::MatrixXd v_full;           // (N+1) x (N+1)
};

inline AugmentedSpectrum augmented_decompose(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    if (a.rows() != b.size())
        throw config_error("augmented_decompose: dimension mismatch");
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd aug(n, n + 1);
    aug.leftCols(n) = a;
    aug.col(n) = b;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(aug, Eigen::ComputeFullV);

    AugmentedSpectrum out;
    out.singular_values = Eigen::VectorXd::Zero(n + 1);
    out.singular_values.head(n) = svd.singularValues();
    out.v_full = svd.matrixV();
    out.v_last_row = out.v_full.row(n).transpose();
    return out;
}

inline constexpr double kTtlsPoleGuard = 1e-12;  // relative to sigma_bar_1^2

// Filter value phi_alpha(t). For TTLS the augmented spectrum is required and
// `guard_hits`, when given, counts skipped near-pole terms
// (|sigma_bar_m^2 - t^2| < 1e-12 * sigma_bar_1^2).
inline double filter_value(const FilterSpec& spec, double t,
                           const AugmentedSpectrum* aug = nullptr,
                           int* guard_hits = nullptr) {
    if (!(t > 0.0)) throw config_error("filter_value: t must be positive");
    switch (spec.scheme) {
        case FilterScheme::tikhonov:
            return t * t / (t * t + spec.alpha);
        case FilterScheme::spectral_cutoff:
            return t * t >= spec.alpha ? 1.0 : 0.0;
        case FilterScheme::ttls: {
            if (aug == nullptr)
                throw config_error("filter_value: ttls requires the augmented spectrum");
            const int np1 = static_cast<int>(aug->v_last_row.size());
            if (spec.k < 1 || spec.k > np1 - 2)
                throw config_error("filter_value: ttls truncation index out of range");
            const double tail2 = aug->v_last_row.tail(np1 - spec.k).squaredNorm();
            if (!(tail2 > 0.0))
                throw numerical_error("filter_value: non-generic TLS instance (zero v-bar tail)");
            const double s1sq = aug->singular_values(0) * aug->singular_values(0);
            double acc = 0.0;
            for (int m = 0; m < spec.k; ++m) {
                const double den = aug->singular_values(m) * aug->singular_values(m) - t * t;
                if (std::abs(den) < kTtlsPoleGuard * s1sq) {
                    if (guard_hits != nullptr) ++*guard_hits;
                    continue;
                }
                const double v = aug->v_last_row(m);
                acc += v * v / tail2 * t * t / den;
            }
            return acc;
        }
    }
    throw config_error("filter_value: unknown scheme");
}

// Spectral-sum solve f = sum_n phi(s_n)/s_n <u_n, b> v_n (Tikhonov and
// spectral cut-off).
inline Eigen::VectorXd filtered_solve(const SpectralSystem& sys, const Eigen::VectorXd& b,
                                      const FilterSpec& spec) {
    if (spec.scheme == FilterScheme::ttls)
        throw config_error("filtered_solve: ttls needs the operator matrix, not just its spectrum");
    if (sys.size() == 0)
        throw numerical_error("filtered_solve: empty spectrum (zero operator)");
    if (b.size() != sys.left_vectors.rows())
        throw config_error("filtered_solve: dimension mismatch");

    Eigen::VectorXd c = sys.left_vectors.transpose() * b;
    for (int i = 0; i < sys.size(); ++i)
        c(i) *= filter_value(spec, sys.singular_values(i)) / sys.singular_values(i);
    return sys.right_vectors * c;
}

// TTLS closed form from the augmented SVD:
//   x = -Vbar_{1:N, k+1:N+1} vbar_{N+1, k+1:N+1}^T / ||vbar_{N+1, k+1:N+1}||^2.
// Pole-free, unlike the filter representation.
inline Eigen::VectorXd ttls_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int k) {
    const int n = static_cast<int>(a.rows());
    if (k < 1 || k > n - 1)
        throw config_error("ttls_solve: truncation index must satisfy 1 <= k <= N-1");
    const AugmentedSpectrum aug = augmented_decompose(a, b);
    const int tail_len = n + 1 - k;
    const Eigen::VectorXd tail = aug.v_last_row.tail(tail_len);
    const double tail2 = tail.squaredNorm();
    if (!(tail2 > 0.0))
        throw numerical_error("ttls_solve: non-generic TLS instance (zero v-bar tail)");
    return -(aug.v_full.topRows(n).rightCols(tail_len) * tail) / tail2;
}

inline Eigen::VectorXd filtered_solve(const OperatorMatrix& a, const Eigen::VectorXd& b,
                                      const FilterSpec& spec) {
    if (spec.scheme == FilterScheme::ttls) return ttls_solve(a.entries, b, spec.k);
    return filtered_solve(decompose(a), b, spec);
}

inline Eigen::VectorXd filtered_solve(const OperatorMatrix& a, const GreensTrace& b,
                                      const FilterSpec& spec) {
    return filtered_solve(a, Eigen::Map<const Eigen::VectorXd>(b.values.data(),
                                                               static_cast<Eigen::Index>(b.values.size())),
                          spec);
}

// Partial sums of the Picard series sum_n (1/s_n) |<u_n, b>|^2; the full sum
// stays bounded exactly when b lies in the range of the square-root operator,
// i.e. when the sampling point sits inside the interface.
inline std::vector<double> picard_partial_sums(const SpectralSystem& sys, const Eigen::VectorXd& b,
                                               int m_max) {
    if (m_max < 0 || m_max > sys.size())
        throw config_error("picard_partial_sums: m_max must lie in [0, spectrum length]");
    if (b.size() != sys.left_vectors.rows())
        throw config_error("picard_partial_sums: dimension mismatch");
    std::vector<double> sums(static_cast<std::size_t>(m_max));
    double acc = 0.0;
    for (int i = 0; i < m_max; ++i) {
        const double c = sys.left_vectors.col(i).dot(b);
        acc += c * c / sys.singular_values(i);
        sums[static_cast<std::size_t>(i)] = acc;
    }
    return sums;
}

inline std::vector<double> picard_partial_sums(const SpectralSystem& sys, const GreensTrace& b,
                                               int m_max) {
    return picard_partial_sums(sys,
                               Eigen::Map<const Eigen::VectorXd>(b.values.data(),
                                                                 static_cast<Eigen::Index>(b.values.size())),
                               m_max);
}

} // namespace eitscan
