// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ipl/core/config.hpp"
#include "ipl/core/parameters.hpp"

namespace ipl {

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with per-tensor step counters, so tensors that sit out an iteration
// (layer freezing) keep a consistent bias correction.
class AdamOptimizer {
public:
    struct Moments {
        Eigen::MatrixXd first;
        Eigen::MatrixXd second;
        long steps = 0;
    };

    AdamOptimizer(AdamOptions options, const ParameterSet& params);

    // Updates every tensor in `params`, or only those named in `selected`.
    void step(ParameterSet& params, const ParameterSet& grads);
    void step(ParameterSet& params, const ParameterSet& grads, std::span<const std::string> selected);

    const AdamOptions& options() const { return options_; }
    const Moments& moments(const std::string& name) const { return state_.at(name); }

private:
    AdamOptions options_;
    std::map<std::string, Moments> state_;
};

// shadow <- decay * shadow + (1 - decay) * current
class EmaTracker {
public:
    EmaTracker(ParameterSet initial, double decay);

    const ParameterSet& update(const ParameterSet& current);
    const ParameterSet& shadow() const { return shadow_; }
    double decay() const { return decay_; }

private:
    ParameterSet shadow_;
    double decay_;
};

const ParameterSet& ema_update(EmaTracker& tracker, const ParameterSet& current);

// Chooses which generator tensors receive the update in an iteration.
struct FreezePolicy {
    FreezeKind kind = FreezeKind::train_all;
    std::vector<std::string> subset;  // fixed_subset: tensor names
    int top_k = 1;                    // nada_adaptive: number of layer groups

    static FreezePolicy from_config(const RunConfig& cfg);

    // nada_adaptive groups tensors by the name prefix before the first '.',
    // ranks groups by RMS gradient and keeps the top_k (ties by name).
    std::vector<std::string> select(const ParameterSet& params, const ParameterSet& grads) const;
};

}  // namespace ipl
