// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/training/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/losses/losses.hpp"
#include "ipl/training/diagnostics.hpp"

namespace ipl {

PromptScheme prepare_scheme(const RunConfig& cfg, PromptSchemeKind kind, const Backend& backend,
                            std::vector<Stage1Record>* stage1_trace) {
    const Rng base(cfg.seed);
    const auto labels = domain_pair(cfg);
    const auto& text = *backend.text_encoder;
    Stage1Options s1;
    s1.templates = backend.templates;
    switch (kind) {
    case PromptSchemeKind::manual_fixed:
        return PromptScheme::manual(text);
    case PromptSchemeKind::learned_fixed: {
        Rng rng = base.derive("stage1");
        auto r = train_shared_prompts(cfg, *backend.source_generator, *backend.image_encoder, text, labels, rng, s1);
        if (stage1_trace) {
            *stage1_trace = std::move(r.trace);
        }
        return PromptScheme::learned(std::move(r.prompts));
    }
    case PromptSchemeKind::random: {
        Rng init = base.derive("mapper.init");
        return PromptScheme::random(init_mapper(cfg, text, init));
    }
    case PromptSchemeKind::adaptive: {
        Rng init = base.derive("mapper.init");
        Rng rng = base.derive("stage1");
        auto r = train_mapper(cfg, init_mapper(cfg, text, init), *backend.source_generator, *backend.image_encoder,
                              text, labels, rng, s1);
        if (stage1_trace) {
            *stage1_trace = std::move(r.trace);
        }
        return PromptScheme::adaptive(std::move(r.mapper));
    }
    }
    throw PreconditionError("unknown prompt scheme");
}

PipelineDiagnostics evaluate_scheme(const RunConfig& cfg, const PromptScheme& scheme, const Generator& adapted,
                                    const Backend& backend, int samples) {
    Rng rng = Rng(cfg.seed).derive("eval");
    const auto labels = domain_pair(cfg);
    const auto& text = *backend.text_encoder;
    const LatentBatch latents = backend.source_generator->sample_latents(samples, rng);

    PipelineDiagnostics d;
    d.delta_t_std = batch_std(text_directions(scheme, latents, text, labels));
    d.diversity = mean_pairwise_cosine_distance(encode_images(*backend.image_encoder, adapted.synthesize(latents)));

    const Embedding label_emb = encode_label_averaged(text, labels.target, backend.templates);
    const auto prompts = scheme_prompts(scheme, latents);
    double acc = 0.0;
    for (const auto& p : prompts) {
        const auto e = encode_prompt_matrix(text, build_prompt_matrix(p, labels.target, text));
        acc += normalize(e).dot(normalize(label_emb));
    }
    d.domain_cos = acc / static_cast<double>(prompts.size());
    return d;
}

PipelineResult run_pipeline(const RunConfig& cfg, PromptSchemeKind kind, const Backend& backend,
                            const PipelineOptions& options) {
    PipelineResult result;
    result.scheme = prepare_scheme(cfg, kind, backend, &result.stage1_trace);
    if (!options.run_stage2) {
        return result;
    }
    Rng rng = Rng(cfg.seed).derive("stage2");
    result.stage2 = adapt_generator(cfg, *backend.source_generator, result.scheme, *backend.image_encoder,
                                    *backend.text_encoder, domain_pair(cfg), FreezePolicy::from_config(cfg), rng);
    result.diagnostics = evaluate_scheme(cfg, result.scheme, *result.stage2.generator, backend, options.eval_samples);
    return result;
}

std::string_view to_string(SweepKind kind) {
    switch (kind) {
    case SweepKind::none: return "none";
    case SweepKind::lambda: return "lambda";
    case SweepKind::m: return "m";
    }
    return "?";
}

Sweep Sweep::parse(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError(fmt::format("sweep '{}' must look like lambda:0,1,10 or m:1,2,4", spec));
    }
    Sweep s;
    const auto kind = trim(spec.substr(0, colon));
    if (kind == "lambda") {
        s.kind = SweepKind::lambda;
    } else if (kind == "m") {
        s.kind = SweepKind::m;
    } else {
        throw ConfigError(fmt::format("unknown sweep parameter '{}' (expected lambda or m)", kind));
    }
    auto rest = spec.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw ConfigError(fmt::format("bad sweep value '{}' in '{}'", item, spec));
        }
        if (s.kind == SweepKind::m && (v < 1 || v != static_cast<int>(v))) {
            throw ConfigError(fmt::format("m sweep values must be positive integers, got '{}'", item));
        }
        if (s.kind == SweepKind::lambda && v < 0) {
            throw ConfigError(fmt::format("lambda sweep values must be >= 0, got '{}'", item));
        }
        s.values.push_back(v);
        if (comma == std::string_view::npos) {
            break;
        }
        rest = rest.substr(comma + 1);
    }
    if (s.values.empty()) {
        throw ConfigError(fmt::format("sweep '{}' has no values", spec));
    }
    return s;
}

RunConfig apply_sweep(RunConfig cfg, SweepKind kind, double value) {
    switch (kind) {
    case SweepKind::lambda:
        cfg.lambda = value;
        cfg.lambda_from_table = false;
        break;
    case SweepKind::m:
        cfg.m = static_cast<int>(value);
        break;
    case SweepKind::none:
        break;
    }
    validate(cfg);
    return cfg;
}

namespace {

AblationCell run_cell(const RunConfig& cfg, PromptSchemeKind scheme, SweepKind sweep, double value,
                      const Backend& backend, const AblationOptions& options) {
    AblationCell cell;
    cell.scheme = scheme;
    cell.sweep = sweep;
    cell.sweep_value = value;
    const auto start = std::chrono::steady_clock::now();
    try {
        const RunConfig c = apply_sweep(cfg, sweep, value);
        auto r = run_pipeline(c, scheme, backend, options.pipeline);
        if (!r.stage1_trace.empty()) {
            cell.stage1_loss = r.stage1_trace.back().l_total;
        }
        const auto& trace = r.stage2.trace;
        const std::size_t tail = std::min<std::size_t>(10, trace.size());
        double acc = 0.0;
        for (std::size_t i = trace.size() - tail; i < trace.size(); ++i) {
            acc += trace[i].l_adapt;
        }
        cell.stage2_loss = tail > 0 ? acc / static_cast<double>(tail) : 0.0;
        for (const auto& rec : trace) {
            cell.max_delta_t_std_trace = std::max(cell.max_delta_t_std_trace, rec.delta_t_std);
        }
        cell.diagnostics = r.diagnostics;
        const int items = std::max(options.prompt_dump_items, options.similarity_items);
        if (items > 0) {
            Rng rng = Rng(c.seed).derive("eval");
            const auto latents = backend.source_generator->sample_latents(items, rng);
            auto prompts = scheme_prompts(r.scheme, latents);
            if (options.similarity_items > 0) {
                const auto& text = *backend.text_encoder;
                const auto labels = domain_pair(c);
                const int n = options.similarity_items;
                Eigen::MatrixXd text_embs(n, text.dim());
                for (int i = 0; i < n; ++i) {
                    text_embs.row(i) = encode_prompt_matrix(
                        text, build_prompt_matrix(prompts[static_cast<std::size_t>(i)], labels.target, text));
                }
                const Eigen::MatrixXd src =
                    backend.source_generator->synthesize(LatentBatch(latents.matrix().topRows(n)));
                cell.similarity = similarity_matrix(encode_images(*backend.image_encoder, src), text_embs);
            }
            prompts.resize(static_cast<std::size_t>(std::max(options.prompt_dump_items, 0)));
            cell.eval_prompts = std::move(prompts);
        }
        cell.ok = true;
    } catch (const Error& e) {
        cell.ok = false;
        cell.error = e.what();
    }
    cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cell;
}

}  // namespace

AblationReport run_ablation(const RunConfig& cfg, std::span<const PromptSchemeKind> schemes,
                            std::span<const Sweep> sweeps, const Backend& backend, const AblationOptions& options) {
    if (schemes.empty()) {
        throw PreconditionError("run_ablation: scheme list is empty");
    }
    AblationReport report;
    auto emit = [&](AblationCell cell) {
        if (options.on_cell) {
            options.on_cell(cell);
        }
        report.cells.push_back(std::move(cell));
    };
    if (sweeps.empty()) {
        for (auto s : schemes) {
            emit(run_cell(cfg, s, SweepKind::none, 0.0, backend, options));
        }
        return report;
    }
    for (const auto& sweep : sweeps) {
        for (auto s : schemes) {
            for (double v : sweep.values) {
                emit(run_cell(cfg, s, sweep.kind, v, backend, options));
            }
        }
    }
    return report;
}

}  // namespace ipl
