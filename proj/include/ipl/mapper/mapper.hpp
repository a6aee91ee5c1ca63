// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ipl/core/autodiff.hpp"
#include "ipl/core/config.hpp"
#include "ipl/core/parameters.hpp"
#include "ipl/core/rng.hpp"
#include "ipl/core/types.hpp"
#include "ipl/encoders/encoder.hpp"

namespace ipl {

inline constexpr std::string_view kManualPrompt = "a photo of a";

// Four-layer fully-connected network from a latent code to m prompt vectors
// of dimension k. Leaky-ReLU (slope 0.2) between layers, none on the output.
// Parameters: layer{0..3}.weight (out x in), layer{0..3}.bias (1 x out).
// A stored weight W acts as W / sqrt(fan_in), so the layer is
// h' = h (W / sqrt(in))^T + b.
struct LatentMapper {
    static constexpr int kLayers = 4;
    static constexpr double kLeakySlope = 0.2;

    int latent_dim = 0;
    int hidden = 0;
    int m = 0;
    int k = 0;
    ParameterSet params;

    // n x (m * k); row i is the flattened (row-major) prompt block of latent i.
    ad::Var forward(const BoundParameters& bound, const ad::Var& latents) const;
};

// Zero-initialized mapper of the given geometry.
LatentMapper make_mapper(int latent_dim, int hidden, int m, int k);

// Seeded initialization: stored weights N(0, 1), hidden biases zero, and
// an output bias reproducing the word embeddings of the manual prompt, so that
// F(0) equals the first min(m, 4) token embeddings (remaining rows zero).
LatentMapper init_mapper(const RunConfig& cfg, const TextEncoder& enc, Rng& rng);

// First min(m, 4) embeddings of the manual prompt, zero rows after that.
Eigen::MatrixXd init_prompt_block(const TextEncoder& enc, int m);

// m x k prompt vectors for one latent code.
Eigen::MatrixXd map_latent(const LatentMapper& F, const LatentCode& w);
std::vector<Eigen::MatrixXd> map_latents(const LatentMapper& F, const LatentBatch& batch);

// Row i of a mapper output reshaped into its m x k prompt block.
ad::Var prompt_block(const ad::Var& mapper_output, Eigen::Index i, int m, int k);

// The same vectors are shared between source and target matrices; only the
// label block differs.
PromptMatrix build_prompt_matrix(const Eigen::MatrixXd& vectors, const DomainLabel& label, const TextEncoder& enc);

// Which prompt vectors drive the text-side direction.
struct PromptScheme {
    PromptSchemeKind kind = PromptSchemeKind::manual_fixed;
    std::optional<Eigen::MatrixXd> fixed;  // manual_fixed, learned_fixed
    std::optional<LatentMapper> mapper;    // random, adaptive

    static PromptScheme manual(const TextEncoder& enc);
    static PromptScheme learned(Eigen::MatrixXd shared);
    static PromptScheme random(LatentMapper untrained);
    static PromptScheme adaptive(LatentMapper trained);

    void check() const;
};

Eigen::MatrixXd scheme_prompts(const PromptScheme& scheme, const LatentCode& w);
std::vector<Eigen::MatrixXd> scheme_prompts(const PromptScheme& scheme, const LatentBatch& batch);

}  // namespace ipl
