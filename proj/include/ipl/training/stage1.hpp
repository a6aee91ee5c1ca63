// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Stage 1: prompt training. The latent mapper (or, for the learned-fixed
// ablation, one shared prompt block) is trained against the frozen source
// generator and encoders with L = L_contr + lambda * L_domain.

#include <functional>
#include <vector>

#include "ipl/core/config.hpp"
#include "ipl/core/rng.hpp"
#include "ipl/encoders/encoder.hpp"
#include "ipl/generators/generator.hpp"
#include "ipl/mapper/mapper.hpp"

namespace ipl {

struct Stage1Record {
    int iteration = 0;
    double l_contr = 0.0;
    double l_domain = 0.0;
    double l_total = 0.0;
    double mean_diag_sim = 0.0;
    double mean_offdiag_sim = 0.0;
    // Mean cos(E_T(M_t^i), label embedding) over the batch.
    double mean_domain_cos = 0.0;
};

struct Stage1Options {
    std::vector<std::string> templates;  // empty: bundled templates
    // Called with (iteration, parameters) every cfg.checkpoint_every iterations
    // and after the last one.
    std::function<void(int, const ParameterSet&)> on_checkpoint;
};

struct Stage1Result {
    LatentMapper mapper;
    std::vector<Stage1Record> trace;
};

struct SharedPromptResult {
    Eigen::MatrixXd prompts;  // m x k
    std::vector<Stage1Record> trace;
};

// Trains `initial` (typically from init_mapper). Latents are drawn from rng.
Stage1Result train_mapper(const RunConfig& cfg, LatentMapper initial, const Generator& source,
                          const ImageEncoder& image_encoder, const TextEncoder& text_encoder, const DomainPair& labels,
                          Rng& rng, const Stage1Options& options = {});

// Same objective, optimizing one m x k block shared by every latent. Starts
// from init_prompt_block.
SharedPromptResult train_shared_prompts(const RunConfig& cfg, const Generator& source,
                                        const ImageEncoder& image_encoder, const TextEncoder& text_encoder,
                                        const DomainPair& labels, Rng& rng, const Stage1Options& options = {});

}  // namespace ipl
