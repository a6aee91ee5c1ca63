// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/training/backend.hpp"

#include <map>
#include <mutex>

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/encoders/templates.hpp"
#include "ipl/encoders/toy_backend.hpp"
#include "ipl/generators/toy_generator.hpp"

namespace ipl {

Backend make_toy_backend(const RunConfig& cfg) {
    const ImageShape shape{cfg.image_size, cfg.image_size};
    Backend b;
    b.image_encoder = std::make_shared<ToyImageEncoder>(cfg.backend_seed, shape, cfg.embed_dim);
    b.text_encoder = std::make_shared<ToyTextEncoder>(cfg.backend_seed, cfg.embed_dim);
    b.source_generator = std::make_shared<ToyGenerator>(cfg.backend_seed, cfg.latent_dim, shape, cfg.generator_hidden,
                                                        cfg.generator_activation);
    b.templates = default_templates();
    return b;
}

namespace {

struct Registry {
    std::mutex mu;
    std::map<std::string, BackendFactory> factories{{"toy", make_toy_backend}};
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

void register_backend(const std::string& name, BackendFactory factory) {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    r.factories[name] = std::move(factory);
}

Backend make_backend(const std::string& name, const RunConfig& cfg) {
    BackendFactory factory;
    {
        auto& r = registry();
        std::lock_guard lock(r.mu);
        auto it = r.factories.find(name);
        if (it == r.factories.end()) {
            throw ConfigError(fmt::format("backend '{}' is not available; register a plugin that provides it", name));
        }
        factory = it->second;
    }
    return factory(cfg);
}

DomainPair domain_pair(const RunConfig& cfg) {
    return DomainPair{DomainLabel(cfg.source_label, DomainRole::source),
                      DomainLabel(cfg.target_label, DomainRole::target)};
}

}  // namespace ipl
