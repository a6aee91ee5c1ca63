// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/training/stage1.hpp"

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/encoders/templates.hpp"
#include "ipl/losses/losses.hpp"
#include "ipl/training/optim.hpp"

namespace ipl {

namespace {

using PromptFn = std::function<std::vector<ad::Var>(const BoundParameters&, const ad::Var& latents)>;

std::vector<Stage1Record> run_stage1(const RunConfig& cfg, ParameterSet& params, const PromptFn& prompts,
                                     const Generator& source, const ImageEncoder& image_encoder,
                                     const TextEncoder& text_encoder, const DomainPair& labels, Rng& rng,
                                     const Stage1Options& options) {
    const auto& templates = options.templates.empty() ? default_templates() : options.templates;
    const Embedding label_emb = encode_label_averaged(text_encoder, labels.target, templates);
    const Eigen::MatrixXd source_tokens = text_encoder.embed_tokens(labels.source.text());
    const Eigen::MatrixXd target_tokens = text_encoder.embed_tokens(labels.target.text());

    AdamOptimizer adam({cfg.lr_mapper, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps}, params);
    std::vector<Stage1Record> trace;
    trace.reserve(static_cast<std::size_t>(cfg.iters_stage1));
    const int n = cfg.n_stage1;

    for (int it = 1; it <= cfg.iters_stage1; ++it) {
        try {
            const LatentBatch latents = source.sample_latents(n, rng);
            const Eigen::MatrixXd image_embs = encode_images(image_encoder, source.synthesize(latents));

            BoundParameters bound(params, true);
            const auto blocks = prompts(bound, ad::Var::constant(latents.matrix()));
            std::vector<ad::Var> src_rows;
            std::vector<ad::Var> tgt_rows;
            src_rows.reserve(blocks.size());
            tgt_rows.reserve(blocks.size());
            for (const auto& b : blocks) {
                src_rows.push_back(encode_prompt_matrix(text_encoder, b, source_tokens));
                tgt_rows.push_back(encode_prompt_matrix(text_encoder, b, target_tokens));
            }
            const auto src_embs = ad::concat_rows(src_rows);
            const auto tgt_embs = ad::concat_rows(tgt_rows);

            const auto S = similarity_matrix(ad::Var::constant(image_embs), src_embs);
            const auto contr = contrastive_loss(S);
            const auto domain = domain_regularization_loss(tgt_embs, label_emb);
            const auto total = ad::add(contr, ad::scale(domain, cfg.lambda));
            ad::backward(total);

            Stage1Record rec;
            rec.iteration = it;
            rec.l_contr = contr.scalar();
            rec.l_domain = domain.scalar();
            rec.l_total = total.scalar();
            const double diag = S.value().trace();
            rec.mean_diag_sim = diag / n;
            rec.mean_offdiag_sim = n > 1 ? (S.value().sum() - diag) / (static_cast<double>(n) * (n - 1)) : 0.0;
            rec.mean_domain_cos = -rec.l_domain / n;
            trace.push_back(rec);

            adam.step(params, bound.gradients());
        } catch (const DegenerateVectorError& e) {
            throw TrainingAbort(fmt::format("stage 1 aborted at iteration {}: {}", it, e.what()));
        }
        if (options.on_checkpoint && (it % cfg.checkpoint_every == 0 || it == cfg.iters_stage1)) {
            options.on_checkpoint(it, params);
        }
    }
    return trace;
}

}  // namespace

Stage1Result train_mapper(const RunConfig& cfg, LatentMapper initial, const Generator& source,
                          const ImageEncoder& image_encoder, const TextEncoder& text_encoder, const DomainPair& labels,
                          Rng& rng, const Stage1Options& options) {
    if (initial.k != text_encoder.dim() || initial.latent_dim != source.latent_dim()) {
        throw DimensionError(fmt::format("mapper geometry (d_w={}, k={}) does not match backend (d_w={}, k={})",
                                         initial.latent_dim, initial.k, source.latent_dim(), text_encoder.dim()));
    }
    Stage1Result result{std::move(initial), {}};
    const LatentMapper& F = result.mapper;
    PromptFn prompts = [&F](const BoundParameters& bound, const ad::Var& latents) {
        const auto out = F.forward(bound, latents);
        std::vector<ad::Var> blocks;
        blocks.reserve(static_cast<std::size_t>(latents.rows()));
        for (Eigen::Index i = 0; i < latents.rows(); ++i) {
            blocks.push_back(prompt_block(out, i, F.m, F.k));
        }
        return blocks;
    };
    result.trace = run_stage1(cfg, result.mapper.params, prompts, source, image_encoder, text_encoder, labels, rng,
                              options);
    return result;
}

SharedPromptResult train_shared_prompts(const RunConfig& cfg, const Generator& source,
                                        const ImageEncoder& image_encoder, const TextEncoder& text_encoder,
                                        const DomainPair& labels, Rng& rng, const Stage1Options& options) {
    ParameterSet params;
    params.add("prompts", init_prompt_block(text_encoder, cfg.m));
    PromptFn prompts = [](const BoundParameters& bound, const ad::Var& latents) {
        return std::vector<ad::Var>(static_cast<std::size_t>(latents.rows()), bound["prompts"]);
    };
    auto trace = run_stage1(cfg, params, prompts, source, image_encoder, text_encoder, labels, rng, options);
    return {params.at("prompts"), std::move(trace)};
}

}  // namespace ipl
