// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Training objectives. Each loss exists as a plain evaluation on values and as
// a differentiable version on ad::Var batches (one item per row). Losses are
// literal per-batch sums; nothing is divided by the batch size.

#include <span>

#include <Eigen/Dense>

#include "ipl/core/autodiff.hpp"
#include "ipl/core/types.hpp"
#include "ipl/encoders/encoder.hpp"

namespace ipl {

inline constexpr double kDegenerateEps = 1e-8;

// L2 normalization. Throws DegenerateVectorError when ||v|| <= 1e-8.
Eigen::VectorXd normalize(const Eigen::VectorXd& v);

// n x n cosines between image row i and text row j.
Eigen::MatrixXd similarity_matrix(const Eigen::MatrixXd& image_embs, const Eigen::MatrixXd& text_embs);
ad::Var similarity_matrix(const ad::Var& image_embs, const ad::Var& text_embs);

// Sum of off-diagonal entries minus sum of diagonal entries.
double contrastive_loss(const Eigen::MatrixXd& S);
ad::Var contrastive_loss(const ad::Var& S);

// -sum_i cos(E_T(M_t^i), label_emb).
double domain_regularization_loss(std::span<const PromptMatrix> target_matrices, const TextEncoder& enc,
                                  const Embedding& label_emb);
// target_embs holds E_T(M_t^i) as rows.
ad::Var domain_regularization_loss(const ad::Var& target_embs, const Embedding& label_emb);

double mapper_loss(const Eigen::MatrixXd& S, std::span<const PromptMatrix> target_matrices, const TextEncoder& enc,
                   const Embedding& label_emb, double lambda);
ad::Var mapper_loss(const ad::Var& S, const ad::Var& target_embs, const Embedding& label_emb, double lambda);

// Norm(tgt) - Norm(src); image and text directions share the construction.
Eigen::VectorXd image_direction(const Eigen::VectorXd& src_emb, const Eigen::VectorXd& tgt_emb);
Eigen::VectorXd text_direction(const Eigen::VectorXd& src_matrix_emb, const Eigen::VectorXd& tgt_matrix_emb);
// Row-wise directions for a batch.
ad::Var direction_rows(const ad::Var& src_embs, const ad::Var& tgt_embs);

struct DirectionPair {
    Eigen::VectorXd delta_i;
    Eigen::VectorXd delta_t;
};

struct DirectionalLossValue {
    double loss = 0.0;
    int skipped = 0;
};

struct DirectionalLoss {
    ad::Var loss;
    int skipped = 0;
};

// sum_i (1 - cos(dI_i, dT_i)). A pair whose image direction has norm <= 1e-8
// contributes the constant 1 (no gradient) and is counted in `skipped`. A
// degenerate text direction throws.
DirectionalLossValue adaptive_directional_loss(std::span<const DirectionPair> pairs);
DirectionalLoss adaptive_directional_loss(const ad::Var& delta_i, const ad::Var& delta_t);

}  // namespace ipl
