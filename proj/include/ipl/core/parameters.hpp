// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ipl/core/autodiff.hpp"

namespace ipl {

// Ordered collection of named trainable tensors. Order is the architecture's
// declaration order and is preserved by archives.
class ParameterSet {
public:
    struct Entry {
        std::string name;
        Eigen::MatrixXd value;
    };

    void add(std::string name, Eigen::MatrixXd value);

    bool contains(std::string_view name) const;
    const Eigen::MatrixXd& at(std::string_view name) const;
    Eigen::MatrixXd& at(std::string_view name);

    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<Entry>& entries() { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::vector<std::string> names() const;
    Eigen::Index element_count() const;

    // Names whose presence or shape differ between the two sets.
    std::vector<std::string> mismatches(const ParameterSet& other) const;
    bool compatible_with(const ParameterSet& other) const { return mismatches(other).empty(); }

    bool operator==(const ParameterSet& other) const;

private:
    std::vector<Entry> entries_;
};

// Parameter values lifted into autodiff leaves for one forward/backward pass.
class BoundParameters {
public:
    BoundParameters(const ParameterSet& params, bool trainable);

    const ad::Var& operator[](std::string_view name) const;
    // Gradients of every bound tensor after ad::backward().
    ParameterSet gradients() const;

private:
    std::vector<std::pair<std::string, ad::Var>> vars_;
};

}  // namespace ipl
