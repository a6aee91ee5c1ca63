// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ipl/core/error.hpp"
#include "ipl/metrics/extractors.hpp"
#include "ipl/metrics/metrics.hpp"
#include "test_util.hpp"

using namespace ipl;

namespace {

Eigen::MatrixXd random_probs(Rng& rng, int n, int c) {
    Eigen::MatrixXd p = test::uniform_matrix(rng, n, c, 0.01, 1.0);
    for (int i = 0; i < n; ++i) {
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

// exp(mean KL) written with loops.
double is_oracle(const Eigen::MatrixXd& p) {
    Eigen::VectorXd py = Eigen::VectorXd::Zero(p.cols());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            py(c) += p(i, c) / static_cast<double>(p.rows());
        }
    }
    double kl = 0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            if (p(i, c) > 0) {
                kl += p(i, c) * std::log(p(i, c) / py(c));
            }
        }
    }
    return std::exp(kl / static_cast<double>(p.rows()));
}

// tr((Sa Sb)^{1/2}) via the (real, non-negative) eigenvalues of Sa Sb.
double frechet_oracle(const FeatureStats& a, const FeatureStats& b) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a.cov * b.cov);
    double tr_sqrt = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        tr_sqrt += std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    }
    return (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * tr_sqrt;
}

Image make_image(int h, int w, const Eigen::VectorXd& px) { return Image{{h, w}, px}; }

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("inception score: limits and oracle") {
    CHECK(inception_score(Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(5.0));
    Eigen::MatrixXd same(4, 3);
    same.rowwise() = Eigen::RowVector3d(0.2, 0.3, 0.5);
    CHECK(inception_score(same) == doctest::Approx(1.0));
    Rng rng(1);
    const Eigen::MatrixXd p = random_probs(rng, 20, 6);
    const double is = inception_score(p);
    CHECK(std::abs(is - is_oracle(p)) < 1e-12);
    CHECK(is >= 1.0);
    CHECK(is <= 6.0);
    Eigen::MatrixXd shuffled = p;
    shuffled.row(0).swap(shuffled.row(7));
    CHECK(std::abs(inception_score(shuffled) - is) < 1e-12);

    Eigen::MatrixXd bad = p;
    bad(0, 0) += 0.1;
    CHECK_THROWS_AS(inception_score(bad), ValidationError);
    bad = p;
    bad(1, 0) = -bad(1, 0);
    CHECK_THROWS_AS(check_class_probs(bad), ValidationError);
}

TEST_CASE("Frechet distance: 1-D, oracle, symmetry, identity") {
    FeatureStats a{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1)};
    FeatureStats b{Eigen::VectorXd::Constant(1, 2.0), Eigen::MatrixXd::Ones(1, 1)};
    CHECK(frechet_distance(a, b) == doctest::Approx(4.0));

    Rng rng(2);
    const FeatureStats x = feature_stats(rng.normal_matrix(30, 4));
    const FeatureStats y = feature_stats(rng.normal_matrix(30, 4, 2.0));
    const double d = frechet_distance(x, y);
    CHECK(std::abs(d - frechet_oracle(x, y)) < 1e-9);
    CHECK(std::abs(d - frechet_distance(y, x)) < 1e-9);
    CHECK(std::abs(frechet_distance(x, x)) < 1e-9);
    CHECK(d >= 0.0);

    FeatureStats asym = x;
    asym.cov(0, 1) += 1.0;
    CHECK_THROWS_AS(frechet_distance(asym, y), ValidationError);
    CHECK_THROWS_AS(feature_stats(rng.normal_matrix(1, 4)), PreconditionError);
}

TEST_CASE("feature_stats: mean and unbiased covariance") {
    Eigen::MatrixXd s(3, 2);
    s << 1, 2, 3, 4, 5, 9;
    const auto st = feature_stats(s);
    CHECK(st.mean(0) == doctest::Approx(3.0));
    CHECK(st.mean(1) == doctest::Approx(5.0));
    CHECK(st.cov(0, 0) == doctest::Approx(4.0));
    CHECK(st.cov(1, 1) == doctest::Approx(13.0));
    CHECK(st.cov(0, 1) == doctest::Approx(7.0));
}

TEST_CASE("SIFID: two-step oracle, identity, permutation, small maps") {
    Rng rng(3);
    const Eigen::MatrixXd fa = rng.normal_matrix(40, 3), fb = rng.normal_matrix(40, 3, 1.5);
    const double s = sifid(fa, fb);
    CHECK(std::abs(s - frechet_distance(feature_stats(fa), feature_stats(fb))) < 1e-9);
    CHECK(std::abs(sifid(fa, fa)) < 1e-9);
    Eigen::MatrixXd perm = fa;
    perm.row(0).swap(perm.row(39));
    perm.row(5).swap(perm.row(17));
    CHECK(std::abs(sifid(perm, fb) - s) < 1e-9);

    SifidOptions strict;
    strict.regularize = false;
    CHECK_THROWS_AS(sifid(fa.topRows(1), fb, strict), PreconditionError);
    CHECK_THROWS_AS(sifid(fa.topRows(3), fb, strict), PreconditionError);

    std::vector<std::string> warnings;
    SifidOptions lenient;
    lenient.on_warning = [&](const std::string& w) { warnings.push_back(w); };
    const double single = sifid(fa.topRows(1), fa.topRows(1), lenient);
    CHECK(std::abs(single) < 1e-9);
    CHECK(!warnings.empty());
    CHECK_THROWS_AS(sifid(fa, rng.normal_matrix(40, 2)), DimensionError);
}

TEST_CASE("identity similarity") {
    Eigen::VectorXd a(3), b(3);
    a << 1, 2, 3;
    b << 3, -1, 0.5;
    CHECK(identity_similarity(a, a * 4) == doctest::Approx(1.0));
    CHECK(identity_similarity(a, -a) == doctest::Approx(-1.0));
    CHECK(identity_similarity(a, b) == doctest::Approx(2.5 / std::sqrt(14.0 * 10.25)));
    CHECK_THROWS_AS(identity_similarity(a, Eigen::VectorXd::Zero(3)), DegenerateVectorError);
    CHECK_THROWS_AS(identity_similarity(a, Eigen::VectorXd::Ones(2)), DimensionError);
}

TEST_CASE("edge map and structural consistency") {
    // Vertical step edge: Sobel x response is 4 per unit step at the boundary columns.
    Eigen::VectorXd px(16);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            px(r * 4 + c) = c >= 2 ? 1.0 : 0.0;
        }
    }
    const Image step = make_image(4, 4, px);
    const Eigen::VectorXd e = edge_map(step);
    REQUIRE(e.size() == 4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(e(i) == doctest::Approx(4.0));
    }

    Rng rng(4);
    const Image img = make_image(6, 5, rng.normal_matrix(30, 1));
    CHECK(structural_consistency(img, img) == doctest::Approx(1.0));
    const Image shifted = make_image(6, 5, (img.pixels.array() + 3.0).matrix());
    CHECK(structural_consistency(img, shifted) == doctest::Approx(1.0));
    const Image scaled = make_image(6, 5, img.pixels * 2.5);
    CHECK(structural_consistency(img, scaled) == doctest::Approx(1.0));
    const Image other = make_image(6, 5, rng.normal_matrix(30, 1));
    const double sc = structural_consistency(img, other);
    CHECK(sc < 1.0);
    CHECK(sc >= 0.0);

    CHECK_THROWS_AS(structural_consistency(img, make_image(6, 5, Eigen::VectorXd::Constant(30, 0.3))),
                    DegenerateVectorError);
    CHECK_THROWS_AS(structural_consistency(img, make_image(5, 6, img.pixels)), DimensionError);
    CHECK_THROWS(edge_map(make_image(2, 2, Eigen::VectorXd::Ones(4))));
}

TEST_CASE("toy extractors are deterministic and shaped") {
    const ImageShape shape{6, 6};
    ToyClassifier clf(1, shape, 10);
    Rng rng(5);
    const Eigen::MatrixXd imgs = rng.normal_matrix(4, 36);
    std::vector<Image> batch;
    for (int i = 0; i < 4; ++i) {
        batch.push_back(make_image(6, 6, imgs.row(i).transpose()));
    }
    const Eigen::MatrixXd p = clf.class_probs(batch);
    CHECK(p.rows() == 4);
    CHECK(p.cols() == 10);
    check_class_probs(p);
    CHECK(ToyClassifier(1, shape, 10).class_probs(batch) == p);

    ToySpatialFeatures sp(2, 8);
    const Eigen::MatrixXd f = sp.features(make_image(6, 6, imgs.row(0).transpose()));
    CHECK(f.rows() == 16);
    CHECK(f.cols() == 8);

    ToyIdentityFeatures id(3, shape, 16);
    CHECK(id.features(make_image(6, 6, imgs.row(1).transpose())).size() == 16);
}

}  // TEST_SUITE
