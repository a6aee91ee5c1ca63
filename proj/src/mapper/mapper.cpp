// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/mapper/mapper.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ipl/core/error.hpp"

namespace ipl {

namespace {

std::string weight_name(int layer) {
    return fmt::format("layer{}.weight", layer);
}

std::string bias_name(int layer) {
    return fmt::format("layer{}.bias", layer);
}

}  // namespace

ad::Var LatentMapper::forward(const BoundParameters& bound, const ad::Var& latents) const {
    if (latents.cols() != latent_dim) {
        throw DimensionError(fmt::format("mapper expects latents of dimension {}, got {}", latent_dim, latents.cols()));
    }
    // Weights are stored at unit scale and multiplied by 1/sqrt(fan_in) here.
    ad::Var h = latents;
    for (int l = 0; l < kLayers; ++l) {
        const auto& w = bound[weight_name(l)];
        h = ad::linear(h, ad::scale(w, 1.0 / std::sqrt(static_cast<double>(w.cols()))), bound[bias_name(l)]);
        if (l + 1 < kLayers) {
            h = ad::leaky_relu(h, kLeakySlope);
        }
    }
    return h;
}

LatentMapper make_mapper(int latent_dim, int hidden, int m, int k) {
    if (latent_dim < 1 || hidden < 1 || m < 1 || k < 1) {
        throw PreconditionError(fmt::format("mapper dims must be positive: d_w={} hidden={} m={} k={}", latent_dim,
                                            hidden, m, k));
    }
    LatentMapper F;
    F.latent_dim = latent_dim;
    F.hidden = hidden;
    F.m = m;
    F.k = k;
    const int widths[] = {latent_dim, hidden, hidden, hidden, m * k};
    for (int l = 0; l < LatentMapper::kLayers; ++l) {
        F.params.add(weight_name(l), Eigen::MatrixXd::Zero(widths[l + 1], widths[l]));
        F.params.add(bias_name(l), Eigen::MatrixXd::Zero(1, widths[l + 1]));
    }
    return F;
}

Eigen::MatrixXd init_prompt_block(const TextEncoder& enc, int m) {
    const Eigen::MatrixXd words = enc.embed_tokens(kManualPrompt);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, enc.dim());
    const auto take = std::min<Eigen::Index>(m, words.rows());
    out.topRows(take) = words.topRows(take);
    return out;
}

LatentMapper init_mapper(const RunConfig& cfg, const TextEncoder& enc, Rng& rng) {
    if (cfg.m < 1) {
        throw PreconditionError("init_mapper: m must be >= 1");
    }
    if (cfg.embed_dim != enc.dim()) {
        throw DimensionError(fmt::format("init_mapper: config embed_dim {} does not match text encoder k={}",
                                         cfg.embed_dim, enc.dim()));
    }
    LatentMapper F = make_mapper(cfg.latent_dim, cfg.effective_mapper_hidden(), cfg.m, enc.dim());
    for (int l = 0; l < LatentMapper::kLayers; ++l) {
        auto& w = F.params.at(weight_name(l));
        w = rng.normal_matrix(w.rows(), w.cols(), 1.0);
    }
    const Eigen::MatrixXd block = init_prompt_block(enc, cfg.m);
    auto& out_bias = F.params.at(bias_name(LatentMapper::kLayers - 1));
    for (Eigen::Index f = 0; f < block.size(); ++f) {
        out_bias(0, f) = block(f / block.cols(), f % block.cols());
    }
    return F;
}

Eigen::MatrixXd map_latent(const LatentMapper& F, const LatentCode& w) {
    if (w.dim() != F.latent_dim) {
        throw DimensionError(fmt::format("mapper expects latents of dimension {}, got {}", F.latent_dim, w.dim()));
    }
    BoundParameters bound(F.params, false);
    auto out = F.forward(bound, ad::Var::constant(w.values().transpose()));
    return prompt_block(out, 0, F.m, F.k).value();
}

std::vector<Eigen::MatrixXd> map_latents(const LatentMapper& F, const LatentBatch& batch) {
    BoundParameters bound(F.params, false);
    auto out = F.forward(bound, ad::Var::constant(batch.matrix()));
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(static_cast<std::size_t>(batch.size()));
    for (Eigen::Index i = 0; i < batch.size(); ++i) {
        blocks.push_back(prompt_block(out, i, F.m, F.k).value());
    }
    return blocks;
}

ad::Var prompt_block(const ad::Var& mapper_output, Eigen::Index i, int m, int k) {
    return ad::reshape(ad::row(mapper_output, i), m, k);
}

PromptMatrix build_prompt_matrix(const Eigen::MatrixXd& vectors, const DomainLabel& label, const TextEncoder& enc) {
    if (vectors.cols() != enc.dim()) {
        throw DimensionError(fmt::format("prompt vectors have k={}, encoder has k={}", vectors.cols(), enc.dim()));
    }
    return PromptMatrix(vectors, enc.embed_tokens(label.text()));
}

PromptScheme PromptScheme::manual(const TextEncoder& enc) {
    return PromptScheme{PromptSchemeKind::manual_fixed, enc.embed_tokens(kManualPrompt), std::nullopt};
}

PromptScheme PromptScheme::learned(Eigen::MatrixXd shared) {
    return PromptScheme{PromptSchemeKind::learned_fixed, std::move(shared), std::nullopt};
}

PromptScheme PromptScheme::random(LatentMapper untrained) {
    return PromptScheme{PromptSchemeKind::random, std::nullopt, std::move(untrained)};
}

PromptScheme PromptScheme::adaptive(LatentMapper trained) {
    return PromptScheme{PromptSchemeKind::adaptive, std::nullopt, std::move(trained)};
}

void PromptScheme::check() const {
    switch (kind) {
    case PromptSchemeKind::manual_fixed:
    case PromptSchemeKind::learned_fixed:
        if (!fixed) {
            throw PreconditionError(fmt::format("prompt scheme '{}' has no fixed prompt block", to_string(kind)));
        }
        break;
    case PromptSchemeKind::random:
    case PromptSchemeKind::adaptive:
        if (!mapper) {
            throw PreconditionError(fmt::format("prompt scheme '{}' has no latent mapper", to_string(kind)));
        }
        break;
    }
}

Eigen::MatrixXd scheme_prompts(const PromptScheme& scheme, const LatentCode& w) {
    scheme.check();
    if (scheme.fixed) {
        return *scheme.fixed;
    }
    return map_latent(*scheme.mapper, w);
}

std::vector<Eigen::MatrixXd> scheme_prompts(const PromptScheme& scheme, const LatentBatch& batch) {
    scheme.check();
    if (scheme.fixed) {
        return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(batch.size()), *scheme.fixed);
    }
    return map_latents(*scheme.mapper, batch);
}

}  // namespace ipl
