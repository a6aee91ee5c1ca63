// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ipl/core/error.hpp"

namespace ipl {

namespace {

constexpr double kProbTol = 1e-6;
constexpr double kStatsTol = 1e-8;
constexpr double kDegenerateEps = 1e-8;

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(fmt::format("{}: vectors have sizes {} and {}", what, a.size(), b.size()));
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > kDegenerateEps) || !(nb > kDegenerateEps)) {
        throw DegenerateVectorError(fmt::format("{}: degenerate input (norms {} and {})", what, na, nb));
    }
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

}  // namespace

void check_class_probs(const Eigen::MatrixXd& probs) {
    if (probs.rows() < 1 || probs.cols() < 1) {
        throw ValidationError("class probability matrix is empty");
    }
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        if (!probs.row(i).allFinite() || probs.row(i).minCoeff() < 0.0) {
            throw ValidationError(fmt::format("class probability row {} has negative or non-finite entries", i));
        }
        const double s = probs.row(i).sum();
        if (std::abs(s - 1.0) > kProbTol) {
            throw ValidationError(fmt::format("class probability row {} sums to {}", i, s));
        }
    }
}

double inception_score(const Eigen::MatrixXd& probs) {
    check_class_probs(probs);
    const Eigen::RowVectorXd marginal = probs.colwise().mean();
    double kl_sum = 0.0;
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        for (Eigen::Index c = 0; c < probs.cols(); ++c) {
            const double p = probs(i, c);
            if (p > 0.0) {
                kl_sum += p * (std::log(p) - std::log(marginal(c)));
            }
        }
    }
    return std::exp(kl_sum / static_cast<double>(probs.rows()));
}

void check_feature_stats(const FeatureStats& stats) {
    const auto f = stats.mean.size();
    if (stats.cov.rows() != f || stats.cov.cols() != f) {
        throw DimensionError(fmt::format("feature stats: mean has {} entries, covariance is {}x{}", f,
                                         stats.cov.rows(), stats.cov.cols()));
    }
    if (!stats.mean.allFinite() || !stats.cov.allFinite()) {
        throw ValidationError("feature stats contain non-finite values");
    }
    const double asym = (stats.cov - stats.cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > kStatsTol) {
        throw ValidationError(fmt::format("covariance is not symmetric (max asymmetry {})", asym));
    }
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(stats.cov, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
    if (lo < -kStatsTol) {
        throw ValidationError(fmt::format("covariance is not positive semi-definite (eigenvalue {})", lo));
    }
}

FeatureStats feature_stats(const Eigen::MatrixXd& samples) {
    if (samples.rows() < 2) {
        throw PreconditionError(fmt::format("feature_stats needs at least 2 samples, got {}", samples.rows()));
    }
    FeatureStats s;
    s.mean = samples.colwise().mean().transpose();
    const Eigen::MatrixXd centered = samples.rowwise() - s.mean.transpose();
    s.cov = centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
    s.cov = 0.5 * (s.cov + s.cov.transpose());
    return s;
}

double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
    if (a.mean.size() != b.mean.size()) {
        throw DimensionError(fmt::format("frechet_distance: feature sizes {} and {}", a.mean.size(), b.mean.size()));
    }
    check_feature_stats(a);
    check_feature_stats(b);
    // tr (S_a S_b)^{1/2} = tr (S_a^{1/2} S_b S_a^{1/2})^{1/2}, the latter symmetric PSD.
    const Eigen::MatrixXd ra = sym_sqrt(a.cov);
    const Eigen::MatrixXd inner = ra * b.cov * ra;
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly)
            .eigenvalues();
    const double tr_sqrt = ev.cwiseMax(0.0).cwiseSqrt().sum();
    const double d = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * tr_sqrt;
    if (d < 0.0) {
        const double scale = 1.0 + a.cov.trace() + b.cov.trace();
        if (d < -kStatsTol * scale) {
            throw ValidationError(fmt::format("frechet_distance came out negative ({})", d));
        }
        return 0.0;
    }
    return d;
}

namespace {

FeatureStats map_stats(const Eigen::MatrixXd& feats, const SifidOptions& options, const char* which) {
    const auto n = feats.rows();
    const auto f = feats.cols();
    if (n < 1 || f < 1) {
        throw PreconditionError(fmt::format("sifid: feature map {} is empty", which));
    }
    if (n >= f + 1) {
        return feature_stats(feats);
    }
    if (!options.regularize) {
        throw PreconditionError(fmt::format(
            "sifid: feature map {} has {} locations, needs at least {} without regularization", which, n, f + 1));
    }
    const std::string msg = fmt::format("sifid: feature map {} has {} locations for {} features; adding {} * I",
                                        which, n, f, options.ridge);
    if (options.on_warning) {
        options.on_warning(msg);
    } else {
        fmt::print(stderr, "warning: {}\n", msg);
    }
    FeatureStats s;
    if (n >= 2) {
        s = feature_stats(feats);
    } else {
        s.mean = feats.row(0).transpose();
        s.cov = Eigen::MatrixXd::Zero(f, f);
    }
    s.cov.diagonal().array() += options.ridge;
    return s;
}

}  // namespace

double sifid(const Eigen::MatrixXd& feats_a, const Eigen::MatrixXd& feats_b, const SifidOptions& options) {
    if (feats_a.cols() != feats_b.cols()) {
        throw DimensionError(fmt::format("sifid: feature sizes {} and {}", feats_a.cols(), feats_b.cols()));
    }
    return frechet_distance(map_stats(feats_a, options, "a"), map_stats(feats_b, options, "b"));
}

double identity_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return cosine(a, b, "identity_similarity");
}

Eigen::VectorXd edge_map(const Image& img) {
    const int h = img.shape.height;
    const int w = img.shape.width;
    if (h < 3 || w < 3) {
        throw PreconditionError(fmt::format("edge_map needs at least 3x3 pixels, got {}x{}", h, w));
    }
    if (img.pixels.size() != img.shape.size()) {
        throw DimensionError(fmt::format("image declares {}x{} but has {} pixels", h, w, img.pixels.size()));
    }
    Eigen::VectorXd out((h - 2) * (w - 2));
    Eigen::Index idx = 0;
    for (int r = 1; r + 1 < h; ++r) {
        for (int c = 1; c + 1 < w; ++c) {
            const double gx = (img.at(r - 1, c + 1) + 2.0 * img.at(r, c + 1) + img.at(r + 1, c + 1)) -
                               (img.at(r - 1, c - 1) + 2.0 * img.at(r, c - 1) + img.at(r + 1, c - 1));
            const double gy = (img.at(r + 1, c - 1) + 2.0 * img.at(r + 1, c) + img.at(r + 1, c + 1)) -
                               (img.at(r - 1, c - 1) + 2.0 * img.at(r - 1, c) + img.at(r - 1, c + 1));
            out(idx++) = std::hypot(gx, gy);
        }
    }
    return out;
}

double structural_consistency(const Image& a, const Image& b) {
    if (!(a.shape == b.shape)) {
        throw DimensionError(fmt::format("structural_consistency: shapes {}x{} and {}x{}", a.shape.height,
                                         a.shape.width, b.shape.height, b.shape.width));
    }
    return cosine(edge_map(a), edge_map(b), "structural_consistency (flat image has no edges)");
}

}  // namespace ipl
