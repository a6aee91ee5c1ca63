// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ipl {

enum class PromptSchemeKind { manual_fixed, learned_fixed, random, adaptive };
enum class FreezeKind { train_all, fixed_subset, nada_adaptive };
enum class GeneratorActivation { tanh, linear };

std::string_view to_string(PromptSchemeKind kind);
std::string_view to_string(FreezeKind kind);
std::string_view to_string(GeneratorActivation act);
PromptSchemeKind parse_prompt_scheme(std::string_view s);
FreezeKind parse_freeze_kind(std::string_view s);
GeneratorActivation parse_activation(std::string_view s);

// Experiment configuration. JSON keys are the member names; see
// docs/config.schema.json.
struct RunConfig {
    int m = 4;
    double lambda = 1.0;
    int n_stage1 = 32;
    int n_stage2 = 2;
    int iters_stage1 = 300;
    int iters_stage2 = 300;
    double lr_mapper = 0.05;
    double lr_generator = 0.002;
    double ema_decay = 0.99;
    std::uint64_t seed = 0;
    PromptSchemeKind prompt_scheme = PromptSchemeKind::adaptive;

    std::string source_label = "Photo";
    std::string target_label = "Disney";

    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    // Stage 2.
    double jitter_scale = 1e-4;
    FreezeKind freeze = FreezeKind::train_all;
    int freeze_top_k = 1;
    std::vector<std::string> freeze_subset;
    int stall_limit = 50;
    int checkpoint_every = 100;

    // Toy backend geometry.
    std::uint64_t backend_seed = 0;
    int embed_dim = 16;
    int latent_dim = 8;
    int image_size = 8;
    int generator_hidden = 16;
    GeneratorActivation generator_activation = GeneratorActivation::tanh;
    int mapper_hidden = 0;  // 0 means latent_dim

    // Passed through to diffusion adapters.
    int diffusion_forward_steps = 100;
    int diffusion_reverse_steps = 250;

    // Set by config_from_json when lambda came from the per-domain table.
    // Not serialized.
    bool lambda_from_table = false;

    int effective_mapper_hidden() const { return mapper_hidden > 0 ? mapper_hidden : latent_dim; }
};

// Field-wise equality on the serialized form (ignores lambda_from_table).
bool operator==(const RunConfig& a, const RunConfig& b);

void validate(const RunConfig& cfg);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& cfg, const std::filesystem::path& path);

// Per-domain loss ratio from the published settings table, keyed by
// "Source→Target" (case-insensitive). family is "gan" or "diffusion".
std::optional<double> lookup_lambda(std::string_view source, std::string_view target,
                                    std::string_view family = "gan");
const nlohmann::json& builtin_lambda_table();

}  // namespace ipl
