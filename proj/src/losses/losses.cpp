// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/losses/losses.hpp"

#include <vector>

#include <fmt/format.h>

#include "ipl/core/error.hpp"

namespace ipl {

namespace {

void check_rows(const Eigen::MatrixXd& m, const char* what) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (!(m.row(i).norm() > kDegenerateEps)) {
            throw DegenerateVectorError(fmt::format("{} row {} is degenerate (norm {})", what, i, m.row(i).norm()));
        }
    }
}

}  // namespace

Eigen::VectorXd normalize(const Eigen::VectorXd& v) {
    const double n = v.norm();
    if (!(n > kDegenerateEps)) {
        throw DegenerateVectorError(fmt::format("cannot normalize vector with norm {}", n));
    }
    return v / n;
}

Eigen::MatrixXd similarity_matrix(const Eigen::MatrixXd& image_embs, const Eigen::MatrixXd& text_embs) {
    return similarity_matrix(ad::Var::constant(image_embs), ad::Var::constant(text_embs)).value();
}

ad::Var similarity_matrix(const ad::Var& image_embs, const ad::Var& text_embs) {
    if (image_embs.rows() != text_embs.rows() || image_embs.cols() != text_embs.cols()) {
        throw DimensionError(fmt::format("similarity_matrix: images {}x{} vs texts {}x{}", image_embs.rows(),
                                         image_embs.cols(), text_embs.rows(), text_embs.cols()));
    }
    check_rows(image_embs.value(), "image embedding");
    check_rows(text_embs.value(), "text embedding");
    return ad::matmul(ad::normalize_rows(image_embs), ad::transpose(ad::normalize_rows(text_embs)));
}

double contrastive_loss(const Eigen::MatrixXd& S) {
    return contrastive_loss(ad::Var::constant(S)).scalar();
}

ad::Var contrastive_loss(const ad::Var& S) {
    if (S.rows() != S.cols()) {
        throw DimensionError(fmt::format("contrastive_loss: {}x{} is not square", S.rows(), S.cols()));
    }
    // off-diagonal sum minus diagonal sum = total - 2 * trace
    return ad::sub(ad::sum(S), ad::scale(ad::trace(S), 2.0));
}

double domain_regularization_loss(std::span<const PromptMatrix> target_matrices, const TextEncoder& enc,
                                  const Embedding& label_emb) {
    if (target_matrices.empty()) {
        throw PreconditionError("domain_regularization_loss: empty batch");
    }
    Eigen::MatrixXd embs(static_cast<Eigen::Index>(target_matrices.size()), enc.dim());
    for (std::size_t i = 0; i < target_matrices.size(); ++i) {
        embs.row(static_cast<Eigen::Index>(i)) = encode_prompt_matrix(enc, target_matrices[i]).transpose();
    }
    return domain_regularization_loss(ad::Var::constant(embs), label_emb).scalar();
}

ad::Var domain_regularization_loss(const ad::Var& target_embs, const Embedding& label_emb) {
    if (target_embs.rows() < 1) {
        throw PreconditionError("domain_regularization_loss: empty batch");
    }
    if (target_embs.cols() != label_emb.size()) {
        throw DimensionError(fmt::format("domain_regularization_loss: embeddings k={}, label k={}", target_embs.cols(),
                                         label_emb.size()));
    }
    if (!(label_emb.norm() > kDegenerateEps)) {
        throw DegenerateVectorError("domain_regularization_loss: label embedding is degenerate");
    }
    check_rows(target_embs.value(), "encoded target prompt matrix");
    auto label = ad::Var::constant(label_emb.transpose().replicate(target_embs.rows(), 1));
    return ad::scale(ad::sum(ad::row_cosine(target_embs, label)), -1.0);
}

double mapper_loss(const Eigen::MatrixXd& S, std::span<const PromptMatrix> target_matrices, const TextEncoder& enc,
                   const Embedding& label_emb, double lambda) {
    if (!(lambda >= 0.0)) {
        throw PreconditionError("mapper_loss: lambda must be >= 0");
    }
    return contrastive_loss(S) + lambda * domain_regularization_loss(target_matrices, enc, label_emb);
}

ad::Var mapper_loss(const ad::Var& S, const ad::Var& target_embs, const Embedding& label_emb, double lambda) {
    if (!(lambda >= 0.0)) {
        throw PreconditionError("mapper_loss: lambda must be >= 0");
    }
    return ad::add(contrastive_loss(S), ad::scale(domain_regularization_loss(target_embs, label_emb), lambda));
}

Eigen::VectorXd image_direction(const Eigen::VectorXd& src_emb, const Eigen::VectorXd& tgt_emb) {
    if (src_emb.size() != tgt_emb.size()) {
        throw DimensionError("image_direction: embedding sizes differ");
    }
    return normalize(tgt_emb) - normalize(src_emb);
}

Eigen::VectorXd text_direction(const Eigen::VectorXd& src_matrix_emb, const Eigen::VectorXd& tgt_matrix_emb) {
    if (src_matrix_emb.size() != tgt_matrix_emb.size()) {
        throw DimensionError("text_direction: embedding sizes differ");
    }
    return normalize(tgt_matrix_emb) - normalize(src_matrix_emb);
}

ad::Var direction_rows(const ad::Var& src_embs, const ad::Var& tgt_embs) {
    check_rows(src_embs.value(), "source embedding");
    check_rows(tgt_embs.value(), "target embedding");
    return ad::sub(ad::normalize_rows(tgt_embs), ad::normalize_rows(src_embs));
}

DirectionalLossValue adaptive_directional_loss(std::span<const DirectionPair> pairs) {
    if (pairs.empty()) {
        throw PreconditionError("adaptive_directional_loss: no pairs");
    }
    const auto k = pairs.front().delta_i.size();
    Eigen::MatrixXd di(static_cast<Eigen::Index>(pairs.size()), k);
    Eigen::MatrixXd dt(static_cast<Eigen::Index>(pairs.size()), k);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].delta_i.size() != k || pairs[i].delta_t.size() != k) {
            throw DimensionError(fmt::format("adaptive_directional_loss: pair {} has mismatched dimensions", i));
        }
        di.row(static_cast<Eigen::Index>(i)) = pairs[i].delta_i.transpose();
        dt.row(static_cast<Eigen::Index>(i)) = pairs[i].delta_t.transpose();
    }
    auto r = adaptive_directional_loss(ad::Var::constant(di), ad::Var::constant(dt));
    return {r.loss.scalar(), r.skipped};
}

DirectionalLoss adaptive_directional_loss(const ad::Var& delta_i, const ad::Var& delta_t) {
    if (delta_i.rows() != delta_t.rows() || delta_i.cols() != delta_t.cols()) {
        throw DimensionError(fmt::format("adaptive_directional_loss: dI {}x{} vs dT {}x{}", delta_i.rows(),
                                         delta_i.cols(), delta_t.rows(), delta_t.cols()));
    }
    const auto n = delta_i.rows();
    std::vector<ad::Var> di_rows;
    std::vector<ad::Var> dt_rows;
    int skipped = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(delta_t.value().row(i).norm() > kDegenerateEps)) {
            throw DegenerateVectorError(fmt::format("text direction {} is degenerate", i));
        }
        if (!(delta_i.value().row(i).norm() > kDegenerateEps)) {
            ++skipped;
            continue;
        }
        di_rows.push_back(ad::row(delta_i, i));
        dt_rows.push_back(ad::row(delta_t, i));
    }
    if (di_rows.empty()) {
        Eigen::MatrixXd value(1, 1);
        value(0, 0) = static_cast<double>(n);
        return {ad::Var::constant(value), skipped};
    }
    auto cos = ad::row_cosine(ad::concat_rows(di_rows), ad::concat_rows(dt_rows));
    return {ad::add_scalar(ad::scale(ad::sum(cos), -1.0), static_cast<double>(n)), skipped};
}

}  // namespace ipl
