// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipl/core/autodiff.hpp"
#include "ipl/core/parameters.hpp"
#include "ipl/core/rng.hpp"
#include "ipl/core/types.hpp"

namespace ipl {

// G(w; theta). synthesize() is read-only and deterministic given the
// parameters; only the Stage-2 trainer mutates parameters.
class Generator {
public:
    virtual ~Generator() = default;

    virtual std::string architecture() const = 0;
    virtual int latent_dim() const = 0;
    virtual ImageShape output_shape() const = 0;
    // Everything needed besides the parameters to rebuild this generator.
    virtual nlohmann::json architecture_spec() const = 0;
    virtual std::unique_ptr<Generator> clone() const = 0;

    // latents: n x latent_dim, returns n x output_shape().size().
    virtual ad::Var synthesize(const BoundParameters& bound, const ad::Var& latents) const = 0;

    // n i.i.d. standard-normal codes. Adapters override with native sampling.
    virtual LatentBatch sample_latents(int n, Rng& rng) const;

    Eigen::MatrixXd synthesize(const LatentBatch& batch) const;
    Image synthesize(const LatentCode& w) const;

    const ParameterSet& parameters() const { return params_; }
    // Replaces the parameter values; names and shapes must match.
    void set_parameters(ParameterSet params);
    ParameterSet& mutable_parameters() { return params_; }

    const std::vector<std::string>& trainable() const { return trainable_; }
    void set_trainable(std::vector<std::string> names);

protected:
    ParameterSet params_;
    std::vector<std::string> trainable_;
};

LatentBatch sample_latents(const Generator& gen, int n, Rng& rng);

// Deep copy; later updates to either do not affect the other.
std::unique_ptr<Generator> clone_generator(const Generator& gen);

// Image j = G((1 - a_j) w1 + a_j w2).
std::vector<Image> latent_interpolate(const Generator& gen, const LatentCode& w1, const LatentCode& w2,
                                      std::span<const double> alphas);

// (1 - a) p1 + a p2, tensor by tensor.
ParameterSet model_interpolate(const ParameterSet& p1, const ParameterSet& p2, double alpha);

// Architecture registry used when loading generator checkpoints. The toy
// architecture is always registered; pretrained-model adapters add their own.
using GeneratorFactory = std::function<std::unique_ptr<Generator>(const nlohmann::json& spec, ParameterSet params)>;
void register_generator_architecture(const std::string& name, GeneratorFactory factory);
std::unique_ptr<Generator> make_generator(const nlohmann::json& spec, ParameterSet params);

// Step counts handed to diffusion-autoencoder adapters.
struct DiffusionStepConfig {
    int forward_steps = 100;
    int reverse_steps = 250;
};

}  // namespace ipl
