// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Desk-scale stand-ins for CLIP. Both encoders are fully determined by a seed.
//
//   image:  e = P x                       P is k x p, entries N(0, 1/p)
//   text:   e = softsign(W mean_rows(M))  W = 3 Q, Q a seeded k x k orthogonal matrix
//
// softsign(x) = x / (1 + |x|) is bounded like tanh but saturates slowly, so
// large prompt vectors never make source and target encodings coincide.
//
// The toy vocabulary holds 64 named unit-norm vectors. Words outside it get a
// unit-norm vector derived from a hash of the word and the seed, so any text
// can be embedded; nearest_word only searches the named vocabulary.
//
// Mean pooling makes the toy text encoder invariant to row order. Real CLIP is
// not.

#include <cstdint>
#include <string>
#include <vector>

#include "ipl/encoders/encoder.hpp"

namespace ipl {

class ToyImageEncoder final : public ImageEncoder {
public:
    ToyImageEncoder(std::uint64_t seed, ImageShape shape, int k);

    int dim() const override { return static_cast<int>(projection_.rows()); }
    ImageShape input_shape() const override { return shape_; }
    ad::Var encode(const ad::Var& images) const override;

    const Eigen::MatrixXd& projection() const { return projection_; }

private:
    ImageShape shape_;
    Eigen::MatrixXd projection_;
};

class ToyTextEncoder final : public TextEncoder {
public:
    ToyTextEncoder(std::uint64_t seed, int k);

    int dim() const override { return static_cast<int>(weight_.rows()); }
    ad::Var encode_rows(const ad::Var& rows) const override;
    Eigen::MatrixXd embed_tokens(std::string_view text) const override;
    const Vocabulary& vocabulary() const override { return vocab_; }

    const Eigen::MatrixXd& weight() const { return weight_; }
    Eigen::VectorXd embed_word(std::string_view word) const;

private:
    std::uint64_t seed_;
    Eigen::MatrixXd weight_;
    Vocabulary vocab_;
};

const std::vector<std::string>& toy_vocabulary_words();

}  // namespace ipl
