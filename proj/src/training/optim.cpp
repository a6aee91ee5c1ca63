// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/training/optim.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ipl/core/error.hpp"

namespace ipl {

AdamOptimizer::AdamOptimizer(AdamOptions options, const ParameterSet& params) : options_(options) {
    for (const auto& e : params.entries()) {
        state_[e.name] = Moments{Eigen::MatrixXd::Zero(e.value.rows(), e.value.cols()),
                                 Eigen::MatrixXd::Zero(e.value.rows(), e.value.cols()), 0};
    }
}

void AdamOptimizer::step(ParameterSet& params, const ParameterSet& grads) {
    const auto names = params.names();
    step(params, grads, names);
}

void AdamOptimizer::step(ParameterSet& params, const ParameterSet& grads, std::span<const std::string> selected) {
    for (const auto& name : selected) {
        auto it = state_.find(name);
        if (it == state_.end()) {
            throw PreconditionError(fmt::format("optimizer has no state for '{}'", name));
        }
        auto& p = params.at(name);
        const auto& g = grads.at(name);
        if (g.rows() != p.rows() || g.cols() != p.cols()) {
            throw DimensionError(fmt::format("gradient for '{}' has shape {}x{}, parameter {}x{}", name, g.rows(),
                                             g.cols(), p.rows(), p.cols()));
        }
        auto& s = it->second;
        s.steps += 1;
        s.first = options_.beta1 * s.first + (1.0 - options_.beta1) * g;
        s.second = options_.beta2 * s.second + (1.0 - options_.beta2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(s.steps));
        const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(s.steps));
        p.array() -= options_.lr * (s.first.array() / c1) / ((s.second.array() / c2).sqrt() + options_.eps);
    }
}

EmaTracker::EmaTracker(ParameterSet initial, double decay) : shadow_(std::move(initial)), decay_(decay) {
    if (!(decay >= 0.0 && decay < 1.0)) {
        throw PreconditionError(fmt::format("EMA decay must lie in [0, 1), got {}", decay));
    }
}

const ParameterSet& EmaTracker::update(const ParameterSet& current) {
    const auto bad = shadow_.mismatches(current);
    if (!bad.empty()) {
        throw DimensionError(fmt::format("EMA shape mismatch: {}", fmt::join(bad, ", ")));
    }
    for (auto& e : shadow_.entries()) {
        e.value = decay_ * e.value + (1.0 - decay_) * current.at(e.name);
    }
    return shadow_;
}

const ParameterSet& ema_update(EmaTracker& tracker, const ParameterSet& current) {
    return tracker.update(current);
}

FreezePolicy FreezePolicy::from_config(const RunConfig& cfg) {
    return FreezePolicy{cfg.freeze, cfg.freeze_subset, cfg.freeze_top_k};
}

namespace {

std::string group_of(const std::string& name) {
    return name.substr(0, name.find('.'));
}

}  // namespace

std::vector<std::string> FreezePolicy::select(const ParameterSet& params, const ParameterSet& grads) const {
    switch (kind) {
    case FreezeKind::train_all:
        return params.names();
    case FreezeKind::fixed_subset:
        for (const auto& n : subset) {
            if (!params.contains(n)) {
                throw PreconditionError(fmt::format("freeze subset names unknown parameter '{}'", n));
            }
        }
        return subset;
    case FreezeKind::nada_adaptive:
        break;
    }
    std::vector<std::string> groups;
    std::map<std::string, std::pair<double, Eigen::Index>> stats;
    for (const auto& e : grads.entries()) {
        const auto g = group_of(e.name);
        if (!stats.count(g)) {
            groups.push_back(g);
        }
        auto& [sq, count] = stats[g];
        sq += e.value.squaredNorm();
        count += e.value.size();
    }
    std::sort(groups.begin(), groups.end(), [&](const std::string& a, const std::string& b) {
        const double ra = std::sqrt(stats[a].first / static_cast<double>(std::max<Eigen::Index>(1, stats[a].second)));
        const double rb = std::sqrt(stats[b].first / static_cast<double>(std::max<Eigen::Index>(1, stats[b].second)));
        if (ra != rb) {
            return ra > rb;
        }
        return a < b;
    });
    groups.resize(std::min<std::size_t>(groups.size(), static_cast<std::size_t>(std::max(top_k, 0))));
    std::vector<std::string> out;
    for (const auto& e : params.entries()) {
        if (std::find(groups.begin(), groups.end(), group_of(e.name)) != groups.end()) {
            out.push_back(e.name);
        }
    }
    return out;
}

}  // namespace ipl
