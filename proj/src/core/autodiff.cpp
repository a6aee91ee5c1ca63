// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/core/autodiff.hpp"

#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "ipl/core/error.hpp"

namespace ipl::ad {

namespace {

void accumulate(Node& parent, const Matrix& g) {
    if (parent.requires_grad) {
        parent.grad += g;
    }
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(fmt::format("{}: shape {}x{} vs {}x{}", op, a.rows(), a.cols(), b.rows(), b.cols()));
    }
}

}  // namespace

Var Var::constant(Matrix value) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    return Var(std::move(node));
}

Var Var::parameter(Matrix value) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->requires_grad = true;
    return Var(std::move(node));
}

Matrix Var::grad() const {
    if (node_->grad.size() == 0) {
        return Matrix::Zero(rows(), cols());
    }
    return node_->grad;
}

double Var::scalar() const {
    if (rows() != 1 || cols() != 1) {
        throw DimensionError(fmt::format("scalar(): value is {}x{}", rows(), cols()));
    }
    return node_->value(0, 0);
}

Var make_var(Matrix value, std::vector<Var> parents, std::function<void(Node&)> bw) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    for (const auto& p : parents) {
        if (p.requires_grad()) {
            node->requires_grad = true;
        }
    }
    if (node->requires_grad) {
        node->parents.reserve(parents.size());
        for (auto& p : parents) {
            if (p.requires_grad()) {
                node->parents.push_back(p.node());
            }
        }
        node->backward = std::move(bw);
    }
    return Var(std::move(node));
}

void backward(const Var& root) {
    if (root.rows() != 1 || root.cols() != 1) {
        throw DimensionError("backward(): root must be 1x1");
    }
    if (!root.requires_grad()) {
        return;
    }
    // Iterative post-order DFS.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.node().get(), 0);
    seen.insert(root.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (p->requires_grad && seen.insert(p).second) {
                stack.emplace_back(p, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    for (Node* n : order) {
        n->grad = Matrix::Zero(n->value.rows(), n->value.cols());
    }
    root.node()->grad(0, 0) = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backward) {
            (*it)->backward(**it);
        }
    }
}

Var matmul(const Var& a, const Var& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError(fmt::format("matmul: {}x{} times {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
    }
    Matrix av = a.value();
    Matrix bv = b.value();
    return make_var(av * bv, {a, b}, [av, bv, a_req = a.requires_grad()](Node& self) {
        std::size_t idx = 0;
        if (a_req) {
            accumulate(*self.parents[idx++], self.grad * bv.transpose());
        }
        if (idx < self.parents.size()) {
            accumulate(*self.parents[idx], av.transpose() * self.grad);
        }
    });
}

Var transpose(const Var& a) {
    return make_var(a.value().transpose(), {a}, [](Node& self) {
        accumulate(*self.parents[0], self.grad.transpose());
    });
}

Var linear(const Var& x, const Var& w, const Var& b) {
    if (x.cols() != w.cols() || b.rows() != 1 || b.cols() != w.rows()) {
        throw DimensionError(fmt::format("linear: input {}x{}, weight {}x{}, bias {}x{}", x.rows(), x.cols(),
                                         w.rows(), w.cols(), b.rows(), b.cols()));
    }
    Matrix xv = x.value();
    Matrix wv = w.value();
    Matrix out = xv * wv.transpose();
    out.rowwise() += b.value().row(0);
    std::vector<Var> parents;
    std::vector<int> roles;
    for (int r = 0; r < 3; ++r) {
        const Var& v = r == 0 ? x : (r == 1 ? w : b);
        if (v.requires_grad()) {
            parents.push_back(v);
            roles.push_back(r);
        }
    }
    return make_var(std::move(out), parents, [xv, wv, roles](Node& self) {
        for (std::size_t i = 0; i < roles.size(); ++i) {
            switch (roles[i]) {
            case 0:
                accumulate(*self.parents[i], self.grad * wv);
                break;
            case 1:
                accumulate(*self.parents[i], self.grad.transpose() * xv);
                break;
            default:
                accumulate(*self.parents[i], self.grad.colwise().sum());
                break;
            }
        }
    });
}

Var add(const Var& a, const Var& b) {
    require_same_shape(a, b, "add");
    return make_var(a.value() + b.value(), {a, b}, [](Node& self) {
        for (auto& p : self.parents) {
            accumulate(*p, self.grad);
        }
    });
}

Var sub(const Var& a, const Var& b) {
    require_same_shape(a, b, "sub");
    const bool a_req = a.requires_grad();
    return make_var(a.value() - b.value(), {a, b}, [a_req](Node& self) {
        std::size_t idx = 0;
        if (a_req) {
            accumulate(*self.parents[idx++], self.grad);
        }
        if (idx < self.parents.size()) {
            accumulate(*self.parents[idx], -self.grad);
        }
    });
}

Var scale(const Var& a, double s) {
    return make_var(a.value() * s, {a}, [s](Node& self) { accumulate(*self.parents[0], self.grad * s); });
}

Var add_scalar(const Var& a, double s) {
    return make_var(a.value().array() + s, {a}, [](Node& self) { accumulate(*self.parents[0], self.grad); });
}

Var tanh(const Var& a) {
    return make_var(a.value().array().tanh().matrix(), {a}, [](Node& self) {
        Matrix local = (1.0 - self.value.array().square()).matrix();
        accumulate(*self.parents[0], self.grad.cwiseProduct(local));
    });
}

Var softsign(const Var& a) {
    const Matrix denom = (1.0 + a.value().array().abs()).matrix();
    return make_var(a.value().cwiseQuotient(denom), {a}, [denom](Node& self) {
        accumulate(*self.parents[0], self.grad.cwiseQuotient(denom.cwiseProduct(denom)));
    });
}

Var leaky_relu(const Var& a, double slope) {
    Matrix mask = (a.value().array() > 0.0).select(Matrix::Ones(a.rows(), a.cols()),
                                                    Matrix::Constant(a.rows(), a.cols(), slope));
    Matrix out = a.value().cwiseProduct(mask);
    return make_var(std::move(out), {a}, [mask](Node& self) {
        accumulate(*self.parents[0], self.grad.cwiseProduct(mask));
    });
}

Var mean_rows(const Var& a) {
    if (a.rows() == 0) {
        throw DimensionError("mean_rows: empty matrix");
    }
    const auto n = a.rows();
    return make_var(a.value().colwise().mean(), {a}, [n](Node& self) {
        accumulate(*self.parents[0], self.grad.replicate(n, 1) / static_cast<double>(n));
    });
}

Var concat_rows(std::span<const Var> parts) {
    if (parts.empty()) {
        throw DimensionError("concat_rows: no inputs");
    }
    const auto cols = parts.front().cols();
    Eigen::Index total = 0;
    for (const auto& p : parts) {
        if (p.cols() != cols) {
            throw DimensionError(fmt::format("concat_rows: column mismatch {} vs {}", p.cols(), cols));
        }
        total += p.rows();
    }
    Matrix out(total, cols);
    std::vector<Var> parents;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> spans;
    Eigen::Index offset = 0;
    for (const auto& p : parts) {
        out.middleRows(offset, p.rows()) = p.value();
        if (p.requires_grad()) {
            parents.push_back(p);
            spans.emplace_back(offset, p.rows());
        }
        offset += p.rows();
    }
    return make_var(std::move(out), parents, [spans](Node& self) {
        for (std::size_t i = 0; i < spans.size(); ++i) {
            accumulate(*self.parents[i], self.grad.middleRows(spans[i].first, spans[i].second));
        }
    });
}

Var row(const Var& a, Eigen::Index i) {
    if (i < 0 || i >= a.rows()) {
        throw DimensionError(fmt::format("row: index {} out of {} rows", i, a.rows()));
    }
    const auto rows = a.rows();
    return make_var(a.value().row(i), {a}, [i, rows](Node& self) {
        Matrix g = Matrix::Zero(rows, self.grad.cols());
        g.row(i) = self.grad.row(0);
        accumulate(*self.parents[0], g);
    });
}

Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols) {
    if (a.rows() * a.cols() != rows * cols) {
        throw DimensionError(fmt::format("reshape: {}x{} to {}x{}", a.rows(), a.cols(), rows, cols));
    }
    const auto src_rows = a.rows();
    const auto src_cols = a.cols();
    Matrix out(rows, cols);
    for (Eigen::Index f = 0; f < rows * cols; ++f) {
        out(f / cols, f % cols) = a.value()(f / src_cols, f % src_cols);
    }
    return make_var(std::move(out), {a}, [src_rows, src_cols, rows, cols](Node& self) {
        Matrix g(src_rows, src_cols);
        for (Eigen::Index f = 0; f < rows * cols; ++f) {
            g(f / src_cols, f % src_cols) = self.grad(f / cols, f % cols);
        }
        accumulate(*self.parents[0], g);
    });
}

Var normalize_rows(const Var& a) {
    Eigen::VectorXd norms = a.value().rowwise().norm();
    Matrix out = norms.cwiseInverse().asDiagonal() * a.value();
    Matrix y = out;
    return make_var(std::move(out), {a}, [y, norms](Node& self) {
        Eigen::VectorXd proj = (y.cwiseProduct(self.grad)).rowwise().sum();
        Matrix g = self.grad - proj.asDiagonal() * y;
        accumulate(*self.parents[0], norms.cwiseInverse().asDiagonal() * g);
    });
}

Var row_cosine(const Var& a, const Var& b) {
    require_same_shape(a, b, "row_cosine");
    Matrix av = a.value();
    Matrix bv = b.value();
    Eigen::VectorXd na = av.rowwise().norm();
    Eigen::VectorXd nb = bv.rowwise().norm();
    Eigen::VectorXd dots = av.cwiseProduct(bv).rowwise().sum();
    Eigen::VectorXd cos = dots.array() / (na.array() * nb.array());
    const bool a_req = a.requires_grad();
    const bool b_req = b.requires_grad();
    return make_var(Matrix(cos), {a, b}, [=](Node& self) {
        const Eigen::VectorXd g = self.grad.col(0);
        std::size_t idx = 0;
        if (a_req) {
            Matrix ga(av.rows(), av.cols());
            for (Eigen::Index i = 0; i < av.rows(); ++i) {
                ga.row(i) = g(i) * (bv.row(i) / (na(i) * nb(i)) - cos(i) * av.row(i) / (na(i) * na(i)));
            }
            accumulate(*self.parents[idx++], ga);
        }
        if (b_req) {
            Matrix gb(bv.rows(), bv.cols());
            for (Eigen::Index i = 0; i < bv.rows(); ++i) {
                gb.row(i) = g(i) * (av.row(i) / (na(i) * nb(i)) - cos(i) * bv.row(i) / (nb(i) * nb(i)));
            }
            accumulate(*self.parents[idx], gb);
        }
    });
}

Var sum(const Var& a) {
    Matrix out(1, 1);
    out(0, 0) = a.value().sum();
    const auto rows = a.rows();
    const auto cols = a.cols();
    return make_var(std::move(out), {a}, [rows, cols](Node& self) {
        accumulate(*self.parents[0], Matrix::Constant(rows, cols, self.grad(0, 0)));
    });
}

Var trace(const Var& a) {
    if (a.rows() != a.cols()) {
        throw DimensionError(fmt::format("trace: {}x{} is not square", a.rows(), a.cols()));
    }
    Matrix out(1, 1);
    out(0, 0) = a.value().trace();
    const auto n = a.rows();
    return make_var(std::move(out), {a}, [n](Node& self) {
        Matrix g = Matrix::Zero(n, n);
        g.diagonal().setConstant(self.grad(0, 0));
        accumulate(*self.parents[0], g);
    });
}

}  // namespace ipl::ad
