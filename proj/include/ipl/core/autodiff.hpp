// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Minimal reverse-mode automatic differentiation over dense double matrices.
//
// A Var is a handle to a node in a dynamically built expression graph. Leaves
// are either constants or parameters (which accumulate gradients). Calling
// backward() on a 1x1 result walks the graph in reverse topological order and
// fills grad() on every node that depends on a parameter.
//
// Batches are stored one item per row throughout the toolkit.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ipl::ad {

using Matrix = Eigen::MatrixXd;

struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;
};

class Var {
public:
    Var() = default;

    static Var constant(Matrix value);
    static Var parameter(Matrix value);

    const Matrix& value() const { return node_->value; }
    // Gradient of the last backward() root with respect to this node. Zero
    // matrix when the node does not depend on any parameter.
    Matrix grad() const;

    Eigen::Index rows() const { return node_->value.rows(); }
    Eigen::Index cols() const { return node_->value.cols(); }
    double scalar() const;
    bool requires_grad() const { return node_->requires_grad; }
    bool valid() const { return static_cast<bool>(node_); }

    const std::shared_ptr<Node>& node() const { return node_; }

private:
    explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}
    friend Var make_var(Matrix value, std::vector<Var> parents, std::function<void(Node&)> backward);

    std::shared_ptr<Node> node_;
};

// Builds an interior node. Parents that do not require gradients are dropped
// from the graph; if none require gradients the node is a constant.
Var make_var(Matrix value, std::vector<Var> parents, std::function<void(Node&)> backward);

void backward(const Var& root);

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
// x * w^T + b, with x (n x in), w (out x in), b (1 x out) broadcast over rows.
Var linear(const Var& x, const Var& w, const Var& b);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);

Var tanh(const Var& a);
// x / (1 + |x|), elementwise.
Var softsign(const Var& a);
Var leaky_relu(const Var& a, double slope);

Var mean_rows(const Var& a);
Var concat_rows(std::span<const Var> parts);
Var row(const Var& a, Eigen::Index i);
// Row-major reshape; element (i, j) of `a` keeps flat index i * a.cols() + j.
Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols);

// Each row divided by its Euclidean norm. Callers check degeneracy first.
Var normalize_rows(const Var& a);
// n x 1 column of cosines between matching rows of a and b.
Var row_cosine(const Var& a, const Var& b);

Var sum(const Var& a);
Var trace(const Var& a);

}  // namespace ipl::ad
