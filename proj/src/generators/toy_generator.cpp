// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/generators/toy_generator.hpp"

#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ipl/core/error.hpp"

namespace ipl {

namespace {

// Output layer scale; small enough that 300 Adam steps at lr 0.002 move
// images by more than their initial magnitude.
constexpr double kOutputScale = 0.03;

}  // namespace

ToyGenerator::ToyGenerator(std::uint64_t seed, int latent_dim, ImageShape shape, int hidden,
                           GeneratorActivation activation)
    : latent_dim_(latent_dim), hidden_(hidden), shape_(shape), activation_(activation) {
    if (latent_dim < 1 || hidden < 1 || shape.height < 1 || shape.width < 1) {
        throw PreconditionError(fmt::format("toy generator dims must be >= 1: d_w={} hidden={} out={}x{}", latent_dim,
                                            hidden, shape.height, shape.width));
    }
    Rng rng = Rng(seed).derive("toy.generator");
    params_.add("fc1.weight", rng.normal_matrix(hidden, latent_dim, 1.0 / std::sqrt(static_cast<double>(latent_dim))));
    params_.add("fc1.bias", Eigen::MatrixXd::Zero(1, hidden));
    params_.add("fc2.weight",
                rng.normal_matrix(shape.size(), hidden, kOutputScale / std::sqrt(static_cast<double>(hidden))));
    params_.add("fc2.bias", Eigen::MatrixXd::Zero(1, shape.size()));
    trainable_ = params_.names();
}

ToyGenerator::ToyGenerator(const nlohmann::json& spec, ParameterSet params) {
    try {
        latent_dim_ = spec.at("latent_dim").get<int>();
        hidden_ = spec.at("hidden").get<int>();
        shape_ = {spec.at("height").get<int>(), spec.at("width").get<int>()};
        activation_ = parse_activation(spec.at("activation").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw IncompatibleError(fmt::format("bad toy generator spec: {}", e.what()));
    }
    ToyGenerator reference(0, latent_dim_, shape_, hidden_, activation_);
    const auto bad = reference.parameters().mismatches(params);
    if (!bad.empty()) {
        throw IncompatibleError(fmt::format("toy generator parameters mismatch: {}", fmt::join(bad, ", ")));
    }
    params_ = std::move(params);
    trainable_ = params_.names();
}

nlohmann::json ToyGenerator::architecture_spec() const {
    return {
        {"architecture", kArchitecture},
        {"latent_dim", latent_dim_},
        {"hidden", hidden_},
        {"height", shape_.height},
        {"width", shape_.width},
        {"activation", std::string(to_string(activation_))},
    };
}

std::unique_ptr<Generator> ToyGenerator::clone() const {
    return std::make_unique<ToyGenerator>(*this);
}

ad::Var ToyGenerator::synthesize(const BoundParameters& bound, const ad::Var& latents) const {
    if (latents.cols() != latent_dim_) {
        throw DimensionError(fmt::format("toy generator expects latents of dimension {}, got {}", latent_dim_,
                                         latents.cols()));
    }
    auto h = ad::linear(latents, bound["fc1.weight"], bound["fc1.bias"]);
    if (activation_ == GeneratorActivation::tanh) {
        h = ad::tanh(h);
    }
    return ad::linear(h, bound["fc2.weight"], bound["fc2.bias"]);
}

std::unique_ptr<Generator> toy_generator(std::uint64_t seed, int latent_dim, ImageShape shape, int hidden,
                                         GeneratorActivation activation) {
    return std::make_unique<ToyGenerator>(seed, latent_dim, shape, hidden, activation);
}

}  // namespace ipl
