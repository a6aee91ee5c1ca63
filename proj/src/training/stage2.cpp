// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/training/stage2.hpp"

#include <limits>

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/losses/losses.hpp"
#include "ipl/training/diagnostics.hpp"

namespace ipl {

Eigen::MatrixXd text_directions(const PromptScheme& scheme, const LatentBatch& latents,
                                const TextEncoder& text_encoder, const DomainPair& labels) {
    const auto prompts = scheme_prompts(scheme, latents);
    Eigen::MatrixXd out(latents.size(), text_encoder.dim());
    for (Eigen::Index i = 0; i < latents.size(); ++i) {
        const auto& p = prompts[static_cast<std::size_t>(i)];
        const auto src = encode_prompt_matrix(text_encoder, build_prompt_matrix(p, labels.source, text_encoder));
        const auto tgt = encode_prompt_matrix(text_encoder, build_prompt_matrix(p, labels.target, text_encoder));
        out.row(i) = text_direction(src, tgt).transpose();
    }
    return out;
}

namespace {

double directional_loss_value(const Generator& gen, const ParameterSet& params, const LatentBatch& latents,
                              const ImageEncoder& image_encoder, const Eigen::MatrixXd& src_embs,
                              const Eigen::MatrixXd& delta_t) {
    BoundParameters bound(params, false);
    const auto images = gen.synthesize(bound, ad::Var::constant(latents.matrix()));
    const auto embs = image_encoder.encode(images);
    const auto di = direction_rows(ad::Var::constant(src_embs), embs);
    return adaptive_directional_loss(di, ad::Var::constant(delta_t)).loss.scalar();
}

}  // namespace

Stage2Result adapt_generator(const RunConfig& cfg, const Generator& source, const PromptScheme& scheme,
                             const ImageEncoder& image_encoder, const TextEncoder& text_encoder,
                             const DomainPair& labels, const FreezePolicy& freeze, Rng& rng,
                             const Stage2Options& options) {
    scheme.check();
    if (scheme.mapper && (scheme.mapper->k != text_encoder.dim() || scheme.mapper->latent_dim != source.latent_dim())) {
        throw DimensionError(fmt::format("mapper geometry (d_w={}, k={}) does not match backend (d_w={}, k={})",
                                         scheme.mapper->latent_dim, scheme.mapper->k, source.latent_dim(),
                                         text_encoder.dim()));
    }
    if (scheme.fixed && scheme.fixed->cols() != text_encoder.dim()) {
        throw DimensionError(fmt::format("fixed prompts have k={}, encoder has k={}", scheme.fixed->cols(),
                                         text_encoder.dim()));
    }

    auto target = clone_generator(source);
    if (cfg.jitter_scale > 0.0) {
        for (auto& e : target->mutable_parameters().entries()) {
            e.value += rng.normal_matrix(e.value.rows(), e.value.cols(), cfg.jitter_scale);
        }
    }
    auto ema_gen = clone_generator(*target);
    EmaTracker ema(target->parameters(), cfg.ema_decay);
    AdamOptimizer adam({cfg.lr_generator, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps}, target->parameters());

    Stage2Result result;
    result.trace.reserve(static_cast<std::size_t>(cfg.iters_stage2));
    int stalled = 0;
    for (int it = 1; it <= cfg.iters_stage2; ++it) {
        const LatentBatch latents = source.sample_latents(cfg.n_stage2, rng);
        const Eigen::MatrixXd src_embs = encode_images(image_encoder, source.synthesize(latents));
        const Eigen::MatrixXd delta_t = text_directions(scheme, latents, text_encoder, labels);

        BoundParameters bound(target->parameters(), true);
        const auto images = target->synthesize(bound, ad::Var::constant(latents.matrix()));
        const auto embs = image_encoder.encode(images);
        DirectionalLoss loss;
        try {
            const auto delta_i = direction_rows(ad::Var::constant(src_embs), embs);
            loss = adaptive_directional_loss(delta_i, ad::Var::constant(delta_t));
        } catch (const DegenerateVectorError& e) {
            throw TrainingAbort(fmt::format("stage 2 aborted at iteration {}: {}", it, e.what()));
        }
        ad::backward(loss.loss);

        stalled = loss.skipped == cfg.n_stage2 ? stalled + 1 : 0;
        if (stalled > cfg.stall_limit) {
            throw TrainingAbort(fmt::format("stage 2 stalled: every image direction degenerate for {} consecutive "
                                            "iterations (at iteration {})",
                                            stalled, it));
        }

        const auto grads = bound.gradients();
        const auto selected = freeze.select(target->parameters(), grads);
        target->set_trainable(selected);
        adam.step(target->mutable_parameters(), grads, selected);
        ema.update(target->parameters());

        Stage2Record rec;
        rec.iteration = it;
        rec.l_adapt = loss.loss.scalar();
        rec.delta_t_std = batch_std(delta_t);
        rec.skipped_pairs = loss.skipped;
        try {
            rec.l_adapt_ema =
                directional_loss_value(*ema_gen, ema.shadow(), latents, image_encoder, src_embs, delta_t);
        } catch (const DegenerateVectorError&) {
            rec.l_adapt_ema = std::numeric_limits<double>::quiet_NaN();
        }
        result.trace.push_back(rec);

        if (options.on_checkpoint && (it % cfg.checkpoint_every == 0 || it == cfg.iters_stage2)) {
            options.on_checkpoint(it, ema.shadow());
        }
    }
    ema_gen->set_parameters(ema.shadow());
    target->set_trainable(target->parameters().names());
    result.generator = std::move(ema_gen);
    result.raw = std::move(target);
    return result;
}

}  // namespace ipl
