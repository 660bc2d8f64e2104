#pragma once

// Reference truncated-TLS solver: its own SVD of [A | b] and the standard
// closed form, kept separate from the regularize machinery it checks.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "eitscan/errors.hpp"

namespace eitscan::verify {

inline Eigen::VectorXd direct_ttls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int k) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || b.size() != n) throw config_error("direct_ttls: dimension mismatch");
    if (k < 1 || k > n) throw config_error("direct_ttls: truncation index out of range");

    Eigen::MatrixXd aug(n, n + 1);
    aug << a, b;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(aug, Eigen::ComputeFullV);
    const Eigen::MatrixXd& v = svd.matrixV();

    const int tail_len = n + 1 - k;
    const Eigen::RowVectorXd tail = v.row(n).tail(tail_len);
    const double tail2 = tail.squaredNorm();
    if (!(tail2 > 0.0)) throw numerical_error("direct_ttls: non-generic TLS instance");
    return -(v.topRows(n).rightCols(tail_len) * tail.transpose()) / tail2;
}

} // namespace eitscan::verify
