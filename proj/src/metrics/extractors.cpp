// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/metrics/extractors.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/core/rng.hpp"

namespace ipl {

namespace {

void check_shape(const Image& img, ImageShape expected, const char* who) {
    if (!(img.shape == expected) || img.pixels.size() != expected.size()) {
        throw DimensionError(fmt::format("{} expects {}x{} images, got {}x{} ({} pixels)", who, expected.height,
                                         expected.width, img.shape.height, img.shape.width, img.pixels.size()));
    }
}

}  // namespace

ToyClassifier::ToyClassifier(std::uint64_t seed, ImageShape shape, int classes) : shape_(shape) {
    if (classes < 2 || shape.size() < 1) {
        throw PreconditionError(fmt::format("toy classifier needs >= 2 classes and a non-empty image, got C={}",
                                            classes));
    }
    Rng rng = Rng(seed).derive("toy.metrics.classifier");
    weight_ = rng.normal_matrix(classes, shape.size(), 1.0 / std::sqrt(static_cast<double>(shape.size())));
}

Eigen::MatrixXd ToyClassifier::class_probs(const std::vector<Image>& images) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(images.size()), weight_.rows());
    for (std::size_t i = 0; i < images.size(); ++i) {
        check_shape(images[i], shape_, "toy classifier");
        Eigen::VectorXd logits = weight_ * images[i].pixels;
        logits.array() -= logits.maxCoeff();
        const Eigen::VectorXd e = logits.array().exp();
        out.row(static_cast<Eigen::Index>(i)) = (e / e.sum()).transpose();
    }
    return out;
}

ToySpatialFeatures::ToySpatialFeatures(std::uint64_t seed, int feature_dim) {
    if (feature_dim < 1) {
        throw PreconditionError("toy spatial features need feature_dim >= 1");
    }
    Rng rng = Rng(seed).derive("toy.metrics.spatial");
    weight_ = rng.normal_matrix(feature_dim, 9, 1.0 / 3.0);
}

Eigen::MatrixXd ToySpatialFeatures::features(const Image& img) const {
    const int h = img.shape.height;
    const int w = img.shape.width;
    if (h < 3 || w < 3 || img.pixels.size() != img.shape.size()) {
        throw PreconditionError(fmt::format("toy spatial features need a well-formed image of at least 3x3, got {}x{}",
                                            h, w));
    }
    Eigen::MatrixXd out((h - 2) * (w - 2), weight_.rows());
    Eigen::VectorXd patch(9);
    Eigen::Index loc = 0;
    for (int r = 1; r + 1 < h; ++r) {
        for (int c = 1; c + 1 < w; ++c) {
            int j = 0;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    patch(j++) = img.at(r + dr, c + dc);
                }
            }
            out.row(loc++) = (weight_ * patch).transpose();
        }
    }
    return out;
}

ToyIdentityFeatures::ToyIdentityFeatures(std::uint64_t seed, ImageShape shape, int feature_dim) : shape_(shape) {
    if (feature_dim < 1 || shape.size() < 1) {
        throw PreconditionError("toy identity features need feature_dim >= 1 and a non-empty image");
    }
    Rng rng = Rng(seed).derive("toy.metrics.identity");
    weight_ = rng.normal_matrix(feature_dim, shape.size(), 1.0 / std::sqrt(static_cast<double>(shape.size())));
}

Eigen::VectorXd ToyIdentityFeatures::features(const Image& img) const {
    check_shape(img, shape_, "toy identity features");
    return weight_ * img.pixels;
}

}  // namespace ipl
