// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Feature and classifier slots for the metrics. Pretrained networks plug in
// behind these interfaces; the toy versions are seeded linear maps.

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ipl/core/types.hpp"

namespace ipl {

class ClassifierExtractor {
public:
    virtual ~ClassifierExtractor() = default;
    virtual int num_classes() const = 0;
    // One row of class probabilities per image.
    virtual Eigen::MatrixXd class_probs(const std::vector<Image>& images) const = 0;
};

class SpatialFeatureExtractor {
public:
    virtual ~SpatialFeatureExtractor() = default;
    virtual int feature_dim() const = 0;
    // (locations x f) feature map of one image.
    virtual Eigen::MatrixXd features(const Image& img) const = 0;
};

class IdentityExtractor {
public:
    virtual ~IdentityExtractor() = default;
    virtual Eigen::VectorXd features(const Image& img) const = 0;
};

// softmax(A x) with A (C x p) drawn N(0, 1/p).
class ToyClassifier : public ClassifierExtractor {
public:
    ToyClassifier(std::uint64_t seed, ImageShape shape, int classes);
    int num_classes() const override { return static_cast<int>(weight_.rows()); }
    Eigen::MatrixXd class_probs(const std::vector<Image>& images) const override;

private:
    ImageShape shape_;
    Eigen::MatrixXd weight_;
};

// Every 3x3 patch (valid positions) projected by a seeded f x 9 matrix.
class ToySpatialFeatures : public SpatialFeatureExtractor {
public:
    ToySpatialFeatures(std::uint64_t seed, int feature_dim);
    int feature_dim() const override { return static_cast<int>(weight_.rows()); }
    Eigen::MatrixXd features(const Image& img) const override;

private:
    Eigen::MatrixXd weight_;
};

// B x with B (f x p) drawn N(0, 1/p).
class ToyIdentityFeatures : public IdentityExtractor {
public:
    ToyIdentityFeatures(std::uint64_t seed, ImageShape shape, int feature_dim);
    Eigen::VectorXd features(const Image& img) const override;

private:
    ImageShape shape_;
    Eigen::MatrixXd weight_;
};

}  // namespace ipl
