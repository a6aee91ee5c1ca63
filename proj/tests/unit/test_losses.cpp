// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ipl/core/error.hpp"
#include "ipl/losses/losses.hpp"
#include "ipl/mapper/mapper.hpp"
#include "ipl/training/backend.hpp"
#include "test_util.hpp"

using namespace ipl;

namespace {

double cos_loop(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double ab = 0, aa = 0, bb = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        ab += a(i) * b(i);
        aa += a(i) * a(i);
        bb += b(i) * b(i);
    }
    return ab / std::sqrt(aa * bb);
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("normalize") {
    Eigen::VectorXd v(2);
    v << 3, 4;
    const auto n = normalize(v);
    CHECK(n(0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(n(1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(normalize(Eigen::VectorXd::Zero(3)), DegenerateVectorError);
    CHECK_THROWS_AS(normalize(Eigen::VectorXd::Constant(3, 1e-10)), DegenerateVectorError);
}

TEST_CASE("similarity_matrix: oracle, bounds, transpose") {
    Rng rng(1);
    const Eigen::MatrixXd I = rng.normal_matrix(5, 6), T = rng.normal_matrix(5, 6);
    const Eigen::MatrixXd S = similarity_matrix(I, T);
    const Eigen::MatrixXd St = similarity_matrix(T, I);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            CHECK(std::abs(S(i, j) - cos_loop(I.row(i).transpose(), T.row(j).transpose())) < 1e-12);
            CHECK(std::abs(S(i, j)) <= 1.0 + 1e-12);
            CHECK(std::abs(S(i, j) - St(j, i)) < 1e-12);
        }
    }
    const Eigen::MatrixXd Sv = similarity_matrix(ad::Var::constant(I), ad::Var::constant(T)).value();
    CHECK((Sv - S).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(similarity_matrix(I, rng.normal_matrix(5, 4)), DimensionError);
}

TEST_CASE("contrastive_loss: fixed values and loop oracle") {
    CHECK(contrastive_loss(Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(-2.0));
    CHECK(contrastive_loss(Eigen::MatrixXd::Ones(2, 2)) == doctest::Approx(0.0));
    // diagonal 1, off-diagonal -1
    const Eigen::MatrixXd S3 = 2.0 * Eigen::MatrixXd::Identity(3, 3) - Eigen::MatrixXd::Ones(3, 3);
    CHECK(contrastive_loss(S3) == doctest::Approx(-9.0));
    Rng rng(2);
    const Eigen::MatrixXd S = test::uniform_matrix(rng, 6, 6, -1.0, 1.0);
    double oracle = 0;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            oracle += (i == j ? -1.0 : 1.0) * S(i, j);
        }
    }
    CHECK(std::abs(contrastive_loss(S) - oracle) < 1e-12);
    CHECK(std::abs(contrastive_loss(ad::Var::constant(S)).scalar() - oracle) < 1e-12);
    CHECK_THROWS_AS(contrastive_loss(Eigen::MatrixXd::Ones(2, 3)), DimensionError);
}

TEST_CASE("domain_regularization_loss") {
    Eigen::VectorXd label(3);
    label << 1, 2, 2;
    Eigen::MatrixXd aligned(1, 3);
    aligned << 2, 4, 4;
    CHECK(domain_regularization_loss(ad::Var::constant(aligned), label).scalar() == doctest::Approx(-1.0));
    Eigen::MatrixXd orth(2, 3);
    orth << 2, -1, 0, 0, 1, -1;
    CHECK(domain_regularization_loss(ad::Var::constant(orth), label).scalar() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mapper_loss combines both parts; value and ad paths agree") {
    RunConfig cfg;
    const auto backend = make_toy_backend(cfg);
    const auto& text = *backend.text_encoder;
    Rng rng(3);
    std::vector<PromptMatrix> targets;
    Eigen::MatrixXd embs(4, text.dim());
    const DomainLabel tgt("Disney", DomainRole::target);
    for (int i = 0; i < 4; ++i) {
        targets.push_back(build_prompt_matrix(rng.normal_matrix(4, text.dim()), tgt, text));
        embs.row(i) = encode_prompt_matrix(text, targets.back()).transpose();
    }
    const Embedding label = encode_text(text, "Disney");
    const Eigen::MatrixXd S = test::uniform_matrix(rng, 4, 4, -1.0, 1.0);
    const double dom = domain_regularization_loss(targets, text, label);
    double oracle = 0;
    for (int i = 0; i < 4; ++i) {
        oracle -= cos_loop(embs.row(i).transpose(), label);
    }
    CHECK(std::abs(dom - oracle) < 1e-12);
    for (double lam : {0.0, 1.0, 10.0}) {
        const double total = mapper_loss(S, targets, text, label, lam);
        CHECK(std::abs(total - (contrastive_loss(S) + lam * dom)) < 1e-10);
        const double total_ad = mapper_loss(ad::Var::constant(S), ad::Var::constant(embs), label, lam).scalar();
        CHECK(std::abs(total - total_ad) < 1e-10);
    }
}

TEST_CASE("directions: normalized difference and degenerate input") {
    Eigen::VectorXd a(2), b(2);
    a << 2, 0;
    b << 0, 3;
    const auto d = image_direction(a, b);
    CHECK(d(0) == doctest::Approx(-1.0));
    CHECK(d(1) == doctest::Approx(1.0));
    CHECK(text_direction(a, b) == d);
    CHECK(image_direction(a, a * 5).norm() < 1e-15);
    CHECK_THROWS_AS(image_direction(Eigen::VectorXd::Zero(2), b), DegenerateVectorError);
    Rng rng(4);
    const Eigen::MatrixXd src = rng.normal_matrix(3, 5), tgt = rng.normal_matrix(3, 5);
    const Eigen::MatrixXd rows = direction_rows(ad::Var::constant(src), ad::Var::constant(tgt)).value();
    for (int i = 0; i < 3; ++i) {
        CHECK((rows.row(i).transpose() - image_direction(src.row(i).transpose(), tgt.row(i).transpose()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
}

TEST_CASE("direction norms lie in [0, 2]") {
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const Eigen::VectorXd a = rng.normal_matrix(6, 1), b = rng.normal_matrix(6, 1, 0.1 + i);
        const double n = image_direction(a, b).norm();
        CHECK(n >= 0.0);
        CHECK(n <= 2.0 + 1e-15);
    }
    const Eigen::VectorXd a = rng.normal_matrix(6, 1);
    CHECK(image_direction(a, -3.0 * a).norm() == doctest::Approx(2.0));
}

TEST_CASE("adaptive_directional_loss: values, invariances, skipping") {
    Eigen::VectorXd u(2), v(2);
    u << 1, 0;
    v << 0, 1;
    auto one = [](Eigen::VectorXd di, Eigen::VectorXd dt) {
        const std::vector<DirectionPair> p{{std::move(di), std::move(dt)}};
        return adaptive_directional_loss(p);
    };
    CHECK(one(u, u).loss == doctest::Approx(0.0));
    CHECK(one(u, -u).loss == doctest::Approx(2.0));
    CHECK(one(u, v).loss == doctest::Approx(1.0));
    CHECK(one(u * 7, v * 0.1 + u * 0.1).loss == doctest::Approx(one(u, v + u).loss));

    Rng rng(5);
    std::vector<DirectionPair> pairs;
    double parts = 0;
    for (int i = 0; i < 4; ++i) {
        pairs.push_back({rng.normal_matrix(6, 1), rng.normal_matrix(6, 1)});
        const std::vector<DirectionPair> single{pairs.back()};
        parts += adaptive_directional_loss(single).loss;
    }
    CHECK(std::abs(adaptive_directional_loss(pairs).loss - parts) < 1e-12);

    // A vanishing image direction contributes 1 without gradient.
    const auto skipped = one(Eigen::VectorXd::Zero(2), v);
    CHECK(skipped.loss == doctest::Approx(1.0));
    CHECK(skipped.skipped == 1);
    CHECK_THROWS_AS(one(u, Eigen::VectorXd::Zero(2)), DegenerateVectorError);

    Eigen::MatrixXd di(2, 2), dt(2, 2);
    di << 0, 0, 1, 0;
    dt << 0, 1, 0, 1;
    const auto x = ad::Var::parameter(di);
    const auto r = adaptive_directional_loss(x, ad::Var::constant(dt));
    CHECK(r.skipped == 1);
    CHECK(r.loss.scalar() == doctest::Approx(2.0));
    ad::backward(r.loss);
    CHECK(x.grad().row(0).isZero(0.0));
}

TEST_CASE("loss gradients match finite differences") {
    Rng rng(6);
    const Eigen::MatrixXd I = rng.normal_matrix(4, 5), T = rng.normal_matrix(4, 5);
    CHECK(test::fd_relative_error(
              [&](const ad::Var& x) { return contrastive_loss(similarity_matrix(x, ad::Var::constant(T))); }, I) <
          1e-6);
    CHECK(test::fd_relative_error(
              [&](const ad::Var& x) { return contrastive_loss(similarity_matrix(ad::Var::constant(I), x)); }, T) <
          1e-6);
    const Eigen::VectorXd label = rng.normal_matrix(5, 1);
    CHECK(test::fd_relative_error([&](const ad::Var& x) { return domain_regularization_loss(x, label); }, T) <
          1e-6);
    const Eigen::MatrixXd src = rng.normal_matrix(4, 5);
    CHECK(test::fd_relative_error(
              [&](const ad::Var& x) {
                  return adaptive_directional_loss(direction_rows(ad::Var::constant(src), x),
                                                   ad::Var::constant(T))
                      .loss;
              },
              I) < 1e-6);
}

}  // TEST_SUITE
