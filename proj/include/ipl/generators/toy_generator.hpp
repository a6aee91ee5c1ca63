// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "ipl/core/config.hpp"
#include "ipl/generators/generator.hpp"

namespace ipl {

// Two-layer decoder: x = W2 act(W1 w + b1) + b2, act = tanh or identity.
// fc1 weights N(0, 1/fan_in), fc2 weights N(0, 0.03^2/fan_in), biases zero at
// construction; all parameters
// trainable. With the linear activation the map is affine in w.
class ToyGenerator final : public Generator {
public:
    static constexpr const char* kArchitecture = "toy_mlp2";

    ToyGenerator(std::uint64_t seed, int latent_dim, ImageShape shape, int hidden,
                 GeneratorActivation activation = GeneratorActivation::tanh);
    ToyGenerator(const nlohmann::json& spec, ParameterSet params);

    std::string architecture() const override { return kArchitecture; }
    int latent_dim() const override { return latent_dim_; }
    ImageShape output_shape() const override { return shape_; }
    nlohmann::json architecture_spec() const override;
    std::unique_ptr<Generator> clone() const override;
    ad::Var synthesize(const BoundParameters& bound, const ad::Var& latents) const override;
    using Generator::synthesize;

    GeneratorActivation activation() const { return activation_; }
    int hidden() const { return hidden_; }

private:
    int latent_dim_ = 0;
    int hidden_ = 0;
    ImageShape shape_;
    GeneratorActivation activation_ = GeneratorActivation::tanh;
};

std::unique_ptr<Generator> toy_generator(std::uint64_t seed, int latent_dim, ImageShape shape, int hidden = 32,
                                         GeneratorActivation activation = GeneratorActivation::tanh);

}  // namespace ipl
