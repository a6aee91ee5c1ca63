// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ipl/core/config.hpp"
#include "ipl/encoders/encoder.hpp"
#include "ipl/generators/generator.hpp"

namespace ipl {

// The frozen pretrained pieces of one experiment: E_I, E_T and G_s.
struct Backend {
    std::shared_ptr<const ImageEncoder> image_encoder;
    std::shared_ptr<const TextEncoder> text_encoder;
    std::shared_ptr<const Generator> source_generator;
    std::vector<std::string> templates;
};

// Toy encoders and generator regenerated from cfg.backend_seed.
Backend make_toy_backend(const RunConfig& cfg);

using BackendFactory = std::function<Backend(const RunConfig&)>;
void register_backend(const std::string& name, BackendFactory factory);
// "toy" is always available. Throws ConfigError for unknown names.
Backend make_backend(const std::string& name, const RunConfig& cfg);

DomainPair domain_pair(const RunConfig& cfg);

}  // namespace ipl
