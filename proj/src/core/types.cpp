// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/core/types.hpp"

#include <fmt/format.h>

#include "ipl/core/error.hpp"

namespace ipl {

LatentCode::LatentCode(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() == 0) {
        throw PreconditionError("latent code must have dimension >= 1");
    }
    if (!values_.allFinite()) {
        throw PreconditionError("latent code has non-finite entries");
    }
}

LatentBatch::LatentBatch(Eigen::MatrixXd codes) : codes_(std::move(codes)) {
    if (codes_.rows() < 1 || codes_.cols() < 1) {
        throw PreconditionError(fmt::format("latent batch must be non-empty, got {}x{}", codes_.rows(), codes_.cols()));
    }
    if (!codes_.allFinite()) {
        throw PreconditionError("latent batch has non-finite entries");
    }
}

LatentBatch LatentBatch::from_codes(std::span<const LatentCode> codes) {
    if (codes.empty()) {
        throw PreconditionError("latent batch must be non-empty");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(codes.size()), codes.front().dim());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i].dim() != m.cols()) {
            throw DimensionError(fmt::format("latent code {} has dimension {}, expected {}", i, codes[i].dim(), m.cols()));
        }
        m.row(static_cast<Eigen::Index>(i)) = codes[i].values().transpose();
    }
    return LatentBatch(std::move(m));
}

PromptMatrix::PromptMatrix(Eigen::MatrixXd prompt_vectors, Eigen::MatrixXd label_tokens)
    : prompt_vectors_(std::move(prompt_vectors)), label_tokens_(std::move(label_tokens)) {
    if (prompt_vectors_.rows() < 1) {
        throw PreconditionError("prompt matrix needs m >= 1 prompt vectors");
    }
    if (label_tokens_.rows() < 1) {
        throw PreconditionError("prompt matrix needs at least one label token");
    }
    if (prompt_vectors_.cols() != label_tokens_.cols()) {
        throw DimensionError(fmt::format("prompt vectors have k={}, label tokens have k={}", prompt_vectors_.cols(),
                                         label_tokens_.cols()));
    }
}

Eigen::MatrixXd PromptMatrix::concatenated() const {
    Eigen::MatrixXd out(m() + t(), k());
    out.topRows(m()) = prompt_vectors_;
    out.bottomRows(t()) = label_tokens_;
    return out;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

DomainLabel::DomainLabel(std::string text, DomainRole role) : text_(trim(text)), role_(role) {
    if (text_.empty()) {
        throw ValidationError("domain label must be non-empty");
    }
}

}  // namespace ipl
