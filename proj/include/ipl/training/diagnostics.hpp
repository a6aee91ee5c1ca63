// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include <Eigen/Dense>

namespace ipl {

// Spread of a batch of row vectors: sqrt of the per-coordinate population
// variance averaged over coordinates. Computed from pairwise differences, so a
// batch of identical rows gives exactly 0.
double batch_std(const Eigen::MatrixXd& rows);

// Mean of (1 - cos) over all unordered pairs of rows.
double mean_pairwise_cosine_distance(const Eigen::MatrixXd& rows);

double median(std::span<const double> values);

}  // namespace ipl
