// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Stage 2: generator adaptation under the adaptive directional loss. The
// target generator starts as a jittered clone of the source generator; the
// prompt scheme supplies the text-side direction for each latent.

#include <functional>
#include <memory>
#include <vector>

#include "ipl/core/config.hpp"
#include "ipl/core/rng.hpp"
#include "ipl/encoders/encoder.hpp"
#include "ipl/generators/generator.hpp"
#include "ipl/mapper/mapper.hpp"
#include "ipl/training/optim.hpp"

namespace ipl {

struct Stage2Record {
    int iteration = 0;
    double l_adapt = 0.0;
    double delta_t_std = 0.0;
    int skipped_pairs = 0;
    // Loss of the EMA copy on the same batch, after the update.
    double l_adapt_ema = 0.0;
};

struct Stage2Options {
    std::vector<std::string> templates;  // unused by the loss; kept for symmetry with Stage 1
    std::function<void(int, const ParameterSet&)> on_checkpoint;  // receives the EMA parameters
};

struct Stage2Result {
    std::unique_ptr<Generator> generator;  // EMA copy, the evaluated one
    std::unique_ptr<Generator> raw;        // last optimizer iterate
    std::vector<Stage2Record> trace;
};

// Text-side directions Norm(E_T(M_t^i)) - Norm(E_T(M_s^i)) for a batch, rows.
Eigen::MatrixXd text_directions(const PromptScheme& scheme, const LatentBatch& latents,
                                const TextEncoder& text_encoder, const DomainPair& labels);

Stage2Result adapt_generator(const RunConfig& cfg, const Generator& source, const PromptScheme& scheme,
                             const ImageEncoder& image_encoder, const TextEncoder& text_encoder,
                             const DomainPair& labels, const FreezePolicy& freeze, Rng& rng,
                             const Stage2Options& options = {});

}  // namespace ipl
