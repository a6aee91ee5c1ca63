// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// End-to-end runs of one prompt scheme and the ablation grid built on them.
//
//   manual_fixed   Stage 2 only, prompts "a photo of a"
//   learned_fixed  Stage 1 on one shared prompt block, then Stage 2
//   random         untrained mapper, then Stage 2
//   adaptive       Stage 1 mapper training, then Stage 2
//
// Random streams are derived from cfg.seed per stage, so schemes compared at
// one seed see the same Stage-2 latents.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipl/core/config.hpp"
#include "ipl/training/backend.hpp"
#include "ipl/training/stage1.hpp"
#include "ipl/training/stage2.hpp"

namespace ipl {

struct PipelineDiagnostics {
    double delta_t_std = 0.0;  // batch_std of text directions over the eval batch
    double diversity = 0.0;    // mean pairwise cosine distance of E_I(G_t(w))
    double domain_cos = 0.0;   // mean cos(E_T(M_t^i), target label embedding)
};

struct PipelineResult {
    PromptScheme scheme;
    std::vector<Stage1Record> stage1_trace;  // empty for manual_fixed and random
    Stage2Result stage2;
    PipelineDiagnostics diagnostics;
};

struct PipelineOptions {
    int eval_samples = 32;
    bool run_stage2 = true;
};

PromptScheme prepare_scheme(const RunConfig& cfg, PromptSchemeKind kind, const Backend& backend,
                            std::vector<Stage1Record>* stage1_trace = nullptr);

PipelineResult run_pipeline(const RunConfig& cfg, PromptSchemeKind kind, const Backend& backend,
                            const PipelineOptions& options = {});

// Diagnostics of a prompt scheme and an adapted generator on a fresh batch.
PipelineDiagnostics evaluate_scheme(const RunConfig& cfg, const PromptScheme& scheme, const Generator& adapted,
                                    const Backend& backend, int samples);

enum class SweepKind { none, lambda, m };

struct Sweep {
    SweepKind kind = SweepKind::none;
    std::vector<double> values;

    // "lambda:0,1,10,20" or "m:1,2,4,8,16".
    static Sweep parse(std::string_view spec);
};

std::string_view to_string(SweepKind kind);

struct AblationCell {
    PromptSchemeKind scheme = PromptSchemeKind::manual_fixed;
    SweepKind sweep = SweepKind::none;
    double sweep_value = 0.0;
    bool ok = false;
    std::string error;
    std::optional<double> stage1_loss;  // final l_total, when Stage 1 ran
    double stage2_loss = 0.0;           // mean l_adapt over the last 10 iterations
    PipelineDiagnostics diagnostics;
    double max_delta_t_std_trace = 0.0;  // largest per-iteration delta_t_std in Stage 2
    double seconds = 0.0;
    std::vector<Eigen::MatrixXd> eval_prompts;  // first few prompt blocks, for nearest-word dumps
    // cos(E_I(G_s(w_i)), E_T(M_t^j)) over the first few eval latents.
    Eigen::MatrixXd similarity;
};

struct AblationReport {
    std::vector<AblationCell> cells;
};

struct AblationOptions {
    PipelineOptions pipeline;
    int prompt_dump_items = 4;
    int similarity_items = 8;
    std::function<void(const AblationCell&)> on_cell;
};

AblationReport run_ablation(const RunConfig& cfg, std::span<const PromptSchemeKind> schemes, std::span<const Sweep> sweeps,
                            const Backend& backend, const AblationOptions& options = {});

RunConfig apply_sweep(RunConfig cfg, SweepKind kind, double value);

}  // namespace ipl
