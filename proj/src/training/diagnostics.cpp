// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/training/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ipl/core/error.hpp"

namespace ipl {

double batch_std(const Eigen::MatrixXd& rows) {
    const auto n = rows.rows();
    if (n < 1 || rows.cols() < 1) {
        throw PreconditionError("batch_std: empty batch");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            acc += (rows.row(i) - rows.row(j)).squaredNorm();
        }
    }
    // sum over ordered pairs is 2 * acc; variance = that / (2 n^2)
    const double var = acc / (static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(rows.cols()));
    return std::sqrt(var);
}

double mean_pairwise_cosine_distance(const Eigen::MatrixXd& rows) {
    const auto n = rows.rows();
    if (n < 2) {
        throw PreconditionError("mean_pairwise_cosine_distance: need at least two rows");
    }
    double acc = 0.0;
    long pairs = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double c = rows.row(i).dot(rows.row(j)) / (rows.row(i).norm() * rows.row(j).norm());
            acc += 1.0 - c;
            ++pairs;
        }
    }
    return acc / static_cast<double>(pairs);
}

double median(std::span<const double> values) {
    if (values.empty()) {
        throw PreconditionError("median of empty sequence");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace ipl
