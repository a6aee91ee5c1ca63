// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ipl {

// CLIP-space vector produced by an image or text encoder.
using Embedding = Eigen::VectorXd;

struct ImageShape {
    int height = 0;
    int width = 0;

    int size() const { return height * width; }
    bool operator==(const ImageShape&) const = default;
};

// Single-channel image, row-major pixels.
struct Image {
    ImageShape shape;
    Eigen::VectorXd pixels;

    double at(int r, int c) const { return pixels(static_cast<Eigen::Index>(r) * shape.width + c); }
};

// Point in the generator's latent space.
class LatentCode {
public:
    explicit LatentCode(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const { return values_; }
    Eigen::Index dim() const { return values_.size(); }

private:
    Eigen::VectorXd values_;
};

// n >= 1 latent codes of a common dimension, one code per row.
class LatentBatch {
public:
    explicit LatentBatch(Eigen::MatrixXd codes);
    static LatentBatch from_codes(std::span<const LatentCode> codes);

    Eigen::Index size() const { return codes_.rows(); }
    Eigen::Index dim() const { return codes_.cols(); }
    LatentCode code(Eigen::Index i) const { return LatentCode(codes_.row(i).transpose()); }
    const Eigen::MatrixXd& matrix() const { return codes_; }

private:
    Eigen::MatrixXd codes_;
};

// m prompt vectors followed by t >= 1 embedding tokens of a domain label.
class PromptMatrix {
public:
    PromptMatrix(Eigen::MatrixXd prompt_vectors, Eigen::MatrixXd label_tokens);

    const Eigen::MatrixXd& prompt_vectors() const { return prompt_vectors_; }
    const Eigen::MatrixXd& label_tokens() const { return label_tokens_; }
    Eigen::Index m() const { return prompt_vectors_.rows(); }
    Eigen::Index t() const { return label_tokens_.rows(); }
    Eigen::Index k() const { return prompt_vectors_.cols(); }

    // (m + t) x k stacked matrix.
    Eigen::MatrixXd concatenated() const;

private:
    Eigen::MatrixXd prompt_vectors_;
    Eigen::MatrixXd label_tokens_;
};

enum class DomainRole { source, target };

class DomainLabel {
public:
    DomainLabel(std::string text, DomainRole role);

    const std::string& text() const { return text_; }
    DomainRole role() const { return role_; }

private:
    std::string text_;
    DomainRole role_;
};

struct DomainPair {
    DomainLabel source;
    DomainLabel target;
};

std::string_view trim(std::string_view s);

}  // namespace ipl
