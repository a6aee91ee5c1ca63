// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Evaluation metrics. All functions are pure; extractors live in
// metrics/extractors.hpp.

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "ipl/core/types.hpp"

namespace ipl {

// Rows are predictive distributions p(y|x_i): non-negative, summing to 1
// within 1e-6. Throws ValidationError otherwise.
void check_class_probs(const Eigen::MatrixXd& probs);

// exp(mean_i KL(p(y|x_i) || p(y))), with p(y) the mean row.
double inception_score(const Eigen::MatrixXd& probs);

struct FeatureStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

// Symmetric within 1e-8 and eigenvalues >= -1e-8, else ValidationError.
void check_feature_stats(const FeatureStats& stats);

// Mean and unbiased covariance of the rows of `samples` (n >= 2).
FeatureStats feature_stats(const Eigen::MatrixXd& samples);

// |mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}).
double frechet_distance(const FeatureStats& a, const FeatureStats& b);

struct SifidOptions {
    // When a map has fewer than f + 1 locations, add ridge * I to its
    // covariance (and report through on_warning) instead of failing.
    bool regularize = true;
    double ridge = 1e-6;
    std::function<void(const std::string&)> on_warning;
};

// Frechet distance between the location-wise statistics of two spatial
// feature maps, each (locations x f).
double sifid(const Eigen::MatrixXd& feats_a, const Eigen::MatrixXd& feats_b, const SifidOptions& options = {});

// Cosine similarity of two identity feature vectors.
double identity_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Sobel gradient magnitude over interior pixels (needs at least 3 x 3).
Eigen::VectorXd edge_map(const Image& img);

// Cosine similarity of the two images' edge maps.
double structural_consistency(const Image& a, const Image& b);

}  // namespace ipl
