// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/generators/generator.hpp"

#include <map>
#include <mutex>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ipl/core/error.hpp"
#include "ipl/generators/toy_generator.hpp"

namespace ipl {

LatentBatch Generator::sample_latents(int n, Rng& rng) const {
    if (n < 1) {
        throw PreconditionError(fmt::format("sample_latents: n must be >= 1, got {}", n));
    }
    return LatentBatch(rng.normal_matrix(n, latent_dim()));
}

Eigen::MatrixXd Generator::synthesize(const LatentBatch& batch) const {
    if (batch.dim() != latent_dim()) {
        throw DimensionError(fmt::format("generator expects latents of dimension {}, got {}", latent_dim(), batch.dim()));
    }
    BoundParameters bound(params_, false);
    return synthesize(bound, ad::Var::constant(batch.matrix())).value();
}

Image Generator::synthesize(const LatentCode& w) const {
    if (w.dim() != latent_dim()) {
        throw DimensionError(fmt::format("generator expects latents of dimension {}, got {}", latent_dim(), w.dim()));
    }
    BoundParameters bound(params_, false);
    auto out = synthesize(bound, ad::Var::constant(w.values().transpose()));
    return Image{output_shape(), out.value().row(0).transpose()};
}

void Generator::set_parameters(ParameterSet params) {
    const auto bad = params_.mismatches(params);
    if (!bad.empty()) {
        throw IncompatibleError(fmt::format("parameter set mismatch: {}", fmt::join(bad, ", ")));
    }
    params_ = std::move(params);
}

void Generator::set_trainable(std::vector<std::string> names) {
    for (const auto& n : names) {
        if (!params_.contains(n)) {
            throw PreconditionError(fmt::format("cannot mark unknown parameter '{}' trainable", n));
        }
    }
    trainable_ = std::move(names);
}

LatentBatch sample_latents(const Generator& gen, int n, Rng& rng) {
    return gen.sample_latents(n, rng);
}

std::unique_ptr<Generator> clone_generator(const Generator& gen) {
    return gen.clone();
}

std::vector<Image> latent_interpolate(const Generator& gen, const LatentCode& w1, const LatentCode& w2,
                                      std::span<const double> alphas) {
    if (w1.dim() != w2.dim() || w1.dim() != gen.latent_dim()) {
        throw DimensionError(fmt::format("latent_interpolate: dimensions {} and {} vs generator {}", w1.dim(), w2.dim(),
                                         gen.latent_dim()));
    }
    std::vector<Image> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw PreconditionError(fmt::format("latent_interpolate: alpha {} outside [0, 1]", a));
        }
        if (a == 0.0 || a == 1.0) {
            out.push_back(gen.synthesize(a == 0.0 ? w1 : w2));
            continue;
        }
        out.push_back(gen.synthesize(LatentCode((1.0 - a) * w1.values() + a * w2.values())));
    }
    return out;
}

ParameterSet model_interpolate(const ParameterSet& p1, const ParameterSet& p2, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw PreconditionError(fmt::format("model_interpolate: alpha {} outside [0, 1]", alpha));
    }
    const auto bad = p1.mismatches(p2);
    if (!bad.empty()) {
        throw IncompatibleError(fmt::format("incompatible parameter sets: {}", fmt::join(bad, ", ")));
    }
    // Endpoints are copied so that signed zeros survive.
    if (alpha == 0.0) {
        return p1;
    }
    ParameterSet out;
    for (const auto& e : p1.entries()) {
        if (alpha == 1.0) {
            out.add(e.name, p2.at(e.name));
            continue;
        }
        const Eigen::MatrixXd& other = p2.at(e.name);
        const Eigen::MatrixXd blend = (1.0 - alpha) * e.value + alpha * other;
        // Entries equal in both sets are kept exactly; the blend can be off by an ulp.
        out.add(e.name, (e.value.array() == other.array()).select(e.value, blend));
    }
    return out;
}

namespace {

struct Registry {
    std::mutex mu;
    std::map<std::string, GeneratorFactory> factories;
};

Registry& registry() {
    static Registry* r = [] {
        auto* reg = new Registry;
        reg->factories[ToyGenerator::kArchitecture] = [](const nlohmann::json& spec, ParameterSet params) {
            return std::make_unique<ToyGenerator>(spec, std::move(params));
        };
        return reg;
    }();
    return *r;
}

}  // namespace

void register_generator_architecture(const std::string& name, GeneratorFactory factory) {
    auto& reg = registry();
    std::lock_guard lock(reg.mu);
    reg.factories[name] = std::move(factory);
}

std::unique_ptr<Generator> make_generator(const nlohmann::json& spec, ParameterSet params) {
    if (!spec.contains("architecture") || !spec["architecture"].is_string()) {
        throw IncompatibleError("generator spec has no architecture identifier");
    }
    const auto name = spec["architecture"].get<std::string>();
    GeneratorFactory factory;
    {
        auto& reg = registry();
        std::lock_guard lock(reg.mu);
        auto it = reg.factories.find(name);
        if (it == reg.factories.end()) {
            throw IncompatibleError(fmt::format("unknown generator architecture '{}'", name));
        }
        factory = it->second;
    }
    return factory(spec, std::move(params));
}

}  // namespace ipl
