// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/core/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/core/types.hpp"

namespace ipl {

using nlohmann::json;

std::string_view to_string(PromptSchemeKind kind) {
    switch (kind) {
    case PromptSchemeKind::manual_fixed: return "manual_fixed";
    case PromptSchemeKind::learned_fixed: return "learned_fixed";
    case PromptSchemeKind::random: return "random";
    case PromptSchemeKind::adaptive: return "adaptive";
    }
    return "?";
}

std::string_view to_string(FreezeKind kind) {
    switch (kind) {
    case FreezeKind::train_all: return "train_all";
    case FreezeKind::fixed_subset: return "fixed_subset";
    case FreezeKind::nada_adaptive: return "nada_adaptive";
    }
    return "?";
}

std::string_view to_string(GeneratorActivation act) {
    return act == GeneratorActivation::tanh ? "tanh" : "linear";
}

PromptSchemeKind parse_prompt_scheme(std::string_view s) {
    for (auto k : {PromptSchemeKind::manual_fixed, PromptSchemeKind::learned_fixed, PromptSchemeKind::random,
                   PromptSchemeKind::adaptive}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw ConfigError(fmt::format("unknown prompt scheme '{}'", s));
}

FreezeKind parse_freeze_kind(std::string_view s) {
    for (auto k : {FreezeKind::train_all, FreezeKind::fixed_subset, FreezeKind::nada_adaptive}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw ConfigError(fmt::format("unknown freeze policy '{}'", s));
}

GeneratorActivation parse_activation(std::string_view s) {
    if (s == "tanh") {
        return GeneratorActivation::tanh;
    }
    if (s == "linear") {
        return GeneratorActivation::linear;
    }
    throw ConfigError(fmt::format("unknown generator activation '{}'", s));
}

namespace {

[[noreturn]] void bad_type(std::string_view key, std::string_view expected) {
    throw ConfigError(fmt::format("config key '{}': expected {}", key, expected));
}

void read_value(const json& v, std::string_view key, int& out) {
    if (!v.is_number_integer()) {
        bad_type(key, "an integer");
    }
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        bad_type(key, "a 32-bit integer");
    }
    out = static_cast<int>(x);
}

void read_value(const json& v, std::string_view key, std::uint64_t& out) {
    if (v.is_number_unsigned()) {
        out = v.get<std::uint64_t>();
        return;
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        out = static_cast<std::uint64_t>(v.get<std::int64_t>());
        return;
    }
    bad_type(key, "a non-negative integer");
}

void read_value(const json& v, std::string_view key, double& out) {
    if (!v.is_number()) {
        bad_type(key, "a number");
    }
    out = v.get<double>();
}

void read_value(const json& v, std::string_view key, std::string& out) {
    if (!v.is_string()) {
        bad_type(key, "a string");
    }
    out = v.get<std::string>();
}

void read_value(const json& v, std::string_view key, std::vector<std::string>& out) {
    if (!v.is_array()) {
        bad_type(key, "an array of strings");
    }
    out.clear();
    for (const auto& item : v) {
        if (!item.is_string()) {
            bad_type(key, "an array of strings");
        }
        out.push_back(item.get<std::string>());
    }
}

template <class Enum, class Parse>
void read_enum(const json& v, std::string_view key, Enum& out, Parse parse) {
    if (!v.is_string()) {
        bad_type(key, "a string");
    }
    try {
        out = parse(v.get<std::string>());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("config key '{}': {}", key, e.what()));
    }
}

void read_value(const json& v, std::string_view key, PromptSchemeKind& out) {
    read_enum(v, key, out, parse_prompt_scheme);
}
void read_value(const json& v, std::string_view key, FreezeKind& out) {
    read_enum(v, key, out, parse_freeze_kind);
}
void read_value(const json& v, std::string_view key, GeneratorActivation& out) {
    read_enum(v, key, out, parse_activation);
}

template <class T>
json write_value(const T& v) {
    if constexpr (std::is_enum_v<T>) {
        return std::string(to_string(v));
    } else {
        return v;
    }
}

struct Field {
    const char* key;
    std::function<void(RunConfig&, const json&)> read;
    std::function<void(const RunConfig&, json&)> write;
};

template <class T>
Field field(const char* key, T RunConfig::*member) {
    return Field{
        key,
        [key, member](RunConfig& cfg, const json& v) { read_value(v, key, cfg.*member); },
        [key, member](const RunConfig& cfg, json& out) { out[key] = write_value(cfg.*member); },
    };
}

const std::vector<Field>& fields() {
    static const std::vector<Field> all = {
        field("m", &RunConfig::m),
        field("lambda", &RunConfig::lambda),
        field("n_stage1", &RunConfig::n_stage1),
        field("n_stage2", &RunConfig::n_stage2),
        field("iters_stage1", &RunConfig::iters_stage1),
        field("iters_stage2", &RunConfig::iters_stage2),
        field("lr_mapper", &RunConfig::lr_mapper),
        field("lr_generator", &RunConfig::lr_generator),
        field("ema_decay", &RunConfig::ema_decay),
        field("seed", &RunConfig::seed),
        field("prompt_scheme", &RunConfig::prompt_scheme),
        field("source_label", &RunConfig::source_label),
        field("target_label", &RunConfig::target_label),
        field("adam_beta1", &RunConfig::adam_beta1),
        field("adam_beta2", &RunConfig::adam_beta2),
        field("adam_eps", &RunConfig::adam_eps),
        field("jitter_scale", &RunConfig::jitter_scale),
        field("freeze", &RunConfig::freeze),
        field("freeze_top_k", &RunConfig::freeze_top_k),
        field("freeze_subset", &RunConfig::freeze_subset),
        field("stall_limit", &RunConfig::stall_limit),
        field("checkpoint_every", &RunConfig::checkpoint_every),
        field("backend_seed", &RunConfig::backend_seed),
        field("embed_dim", &RunConfig::embed_dim),
        field("latent_dim", &RunConfig::latent_dim),
        field("image_size", &RunConfig::image_size),
        field("generator_hidden", &RunConfig::generator_hidden),
        field("generator_activation", &RunConfig::generator_activation),
        field("mapper_hidden", &RunConfig::mapper_hidden),
        field("diffusion_forward_steps", &RunConfig::diffusion_forward_steps),
        field("diffusion_reverse_steps", &RunConfig::diffusion_reverse_steps),
    };
    return all;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    return config_to_json(a) == config_to_json(b);
}

void validate(const RunConfig& cfg) {
    auto positive = [](std::string_view key, int v) {
        if (v < 1) {
            throw ValidationError(fmt::format("'{}' must be positive, got {}", key, v));
        }
    };
    positive("m", cfg.m);
    positive("n_stage1", cfg.n_stage1);
    positive("n_stage2", cfg.n_stage2);
    positive("iters_stage1", cfg.iters_stage1);
    positive("iters_stage2", cfg.iters_stage2);
    positive("freeze_top_k", cfg.freeze_top_k);
    positive("stall_limit", cfg.stall_limit);
    positive("checkpoint_every", cfg.checkpoint_every);
    positive("embed_dim", cfg.embed_dim);
    positive("latent_dim", cfg.latent_dim);
    positive("image_size", cfg.image_size);
    positive("generator_hidden", cfg.generator_hidden);
    positive("diffusion_forward_steps", cfg.diffusion_forward_steps);
    positive("diffusion_reverse_steps", cfg.diffusion_reverse_steps);
    if (cfg.mapper_hidden < 0) {
        throw ValidationError("'mapper_hidden' must be >= 0");
    }
    if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
        throw ValidationError(fmt::format("'lambda' must be a finite value >= 0, got {}", cfg.lambda));
    }
    if (!(cfg.ema_decay >= 0.0 && cfg.ema_decay < 1.0)) {
        throw ValidationError(fmt::format("'ema_decay' must lie in [0, 1), got {}", cfg.ema_decay));
    }
    if (!(cfg.lr_mapper > 0.0) || !(cfg.lr_generator > 0.0)) {
        throw ValidationError("learning rates must be positive");
    }
    if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) || !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0)) {
        throw ValidationError("Adam betas must lie in [0, 1)");
    }
    if (!(cfg.adam_eps > 0.0)) {
        throw ValidationError("'adam_eps' must be positive");
    }
    if (!(cfg.jitter_scale >= 0.0)) {
        throw ValidationError("'jitter_scale' must be >= 0");
    }
    if (trim(cfg.source_label).empty() || trim(cfg.target_label).empty()) {
        throw ValidationError("domain labels must be non-empty");
    }
    if (cfg.freeze == FreezeKind::fixed_subset && cfg.freeze_subset.empty()) {
        throw ValidationError("freeze policy 'fixed_subset' needs a non-empty 'freeze_subset'");
    }
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    const auto& fs = fields();
    for (const auto& [key, value] : j.items()) {
        const bool known = std::any_of(fs.begin(), fs.end(), [&](const Field& f) { return key == f.key; });
        if (!known) {
            throw ConfigError(fmt::format("unknown config key '{}'", key));
        }
    }
    RunConfig cfg;
    for (const auto& f : fs) {
        if (auto it = j.find(f.key); it != j.end()) {
            f.read(cfg, *it);
        }
    }
    if (!j.contains("lambda")) {
        if (auto table = lookup_lambda(cfg.source_label, cfg.target_label)) {
            cfg.lambda = *table;
            cfg.lambda_from_table = true;
        }
    }
    validate(cfg);
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    json out = json::object();
    for (const auto& f : fields()) {
        f.write(cfg, out);
    }
    return out;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
    }
    return config_from_json(j);
}

void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(fmt::format("cannot write config file '{}'", path.string()));
    }
    out << config_to_json(cfg).dump(2) << '\n';
}

const json& builtin_lambda_table() {
    // Keep in sync with data/lambda_table.json (checked by a unit test).
    static const json table = {
        {"gan",
         {
             {"Photo→Disney", 1},
             {"Photo→Anime painting", 1},
             {"Photo→Wall painting", 1},
             {"Photo→Ukiyo-e", 1},
             {"Human→Pixar character", 1},
             {"Human→Tolkien elf", 5},
             {"Human→Werewolf", 5},
             {"Photo→Cartoon", 10},
             {"Photo→Pointillism", 10},
             {"Photo→Cubism", 10},
         }},
        {"diffusion",
         {
             {"Photo→Wall painting", 3},
             {"Human→Tolkien elf", 2},
         }},
    };
    return table;
}

std::optional<double> lookup_lambda(std::string_view source, std::string_view target, std::string_view family) {
    const auto& table = builtin_lambda_table();
    auto fam = table.find(std::string(family));
    if (fam == table.end()) {
        return std::nullopt;
    }
    const std::string wanted = lower(fmt::format("{}→{}", trim(source), trim(target)));
    for (const auto& [key, value] : fam->items()) {
        if (lower(key) == wanted) {
            return value.get<double>();
        }
    }
    return std::nullopt;
}

}  // namespace ipl
