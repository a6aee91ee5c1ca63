// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/core/parameters.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "ipl/core/error.hpp"

namespace ipl {

void ParameterSet::add(std::string name, Eigen::MatrixXd value) {
    if (contains(name)) {
        throw PreconditionError(fmt::format("duplicate parameter name '{}'", name));
    }
    entries_.push_back({std::move(name), std::move(value)});
}

bool ParameterSet::contains(std::string_view name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

const Eigen::MatrixXd& ParameterSet::at(std::string_view name) const {
    for (const auto& e : entries_) {
        if (e.name == name) {
            return e.value;
        }
    }
    throw PreconditionError(fmt::format("unknown parameter '{}'", name));
}

Eigen::MatrixXd& ParameterSet::at(std::string_view name) {
    return const_cast<Eigen::MatrixXd&>(std::as_const(*this).at(name));
}

std::vector<std::string> ParameterSet::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
        out.push_back(e.name);
    }
    return out;
}

Eigen::Index ParameterSet::element_count() const {
    Eigen::Index n = 0;
    for (const auto& e : entries_) {
        n += e.value.size();
    }
    return n;
}

std::vector<std::string> ParameterSet::mismatches(const ParameterSet& other) const {
    std::set<std::string> bad;
    for (const auto& e : entries_) {
        if (!other.contains(e.name)) {
            bad.insert(e.name);
            continue;
        }
        const auto& o = other.at(e.name);
        if (o.rows() != e.value.rows() || o.cols() != e.value.cols()) {
            bad.insert(e.name);
        }
    }
    for (const auto& e : other.entries_) {
        if (!contains(e.name)) {
            bad.insert(e.name);
        }
    }
    return {bad.begin(), bad.end()};
}

bool ParameterSet::operator==(const ParameterSet& other) const {
    if (entries_.size() != other.entries_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& a = entries_[i];
        const auto& b = other.entries_[i];
        if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols() ||
            a.value != b.value) {
            return false;
        }
    }
    return true;
}

BoundParameters::BoundParameters(const ParameterSet& params, bool trainable) {
    vars_.reserve(params.size());
    for (const auto& e : params.entries()) {
        vars_.emplace_back(e.name, trainable ? ad::Var::parameter(e.value) : ad::Var::constant(e.value));
    }
}

const ad::Var& BoundParameters::operator[](std::string_view name) const {
    for (const auto& [n, v] : vars_) {
        if (n == name) {
            return v;
        }
    }
    throw PreconditionError(fmt::format("unknown parameter '{}'", name));
}

ParameterSet BoundParameters::gradients() const {
    ParameterSet out;
    for (const auto& [n, v] : vars_) {
        out.add(n, v.grad());
    }
    return out;
}

}  // namespace ipl
