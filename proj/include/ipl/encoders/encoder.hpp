// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Image encoder E_I and text encoder E_T interfaces.
//
// Encoders are immutable after construction and may be shared read-only across
// threads. Outputs are raw (unnormalized) embeddings; normalization happens in
// the loss functions.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ipl/core/autodiff.hpp"
#include "ipl/core/types.hpp"

namespace ipl {

class Vocabulary {
public:
    struct Entry {
        std::string word;
        Eigen::VectorXd vector;
    };

    void add(std::string word, Eigen::VectorXd vector);
    const Eigen::VectorXd* find(std::string_view word) const;

    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<Entry> entries_;
};

struct NearestWord {
    std::string word;
    double distance = 0.0;
};

// Vocabulary entry at minimum Euclidean distance; ties go to the
// lexicographically smallest word.
NearestWord nearest_word(const Vocabulary& vocab, const Eigen::VectorXd& v);

// Lower-cases, splits on whitespace and strips surrounding punctuation.
std::vector<std::string> tokenize(std::string_view text);

class ImageEncoder {
public:
    virtual ~ImageEncoder() = default;

    virtual int dim() const = 0;
    virtual ImageShape input_shape() const = 0;
    // images: n x input_shape().size(), one image per row. Returns n x dim().
    virtual ad::Var encode(const ad::Var& images) const = 0;
};

class TextEncoder {
public:
    virtual ~TextEncoder() = default;

    virtual int dim() const = 0;
    // Token-embedding rows ((m + t) x k) to a 1 x k embedding. Prompt vectors
    // enter here directly, without tokenization.
    virtual ad::Var encode_rows(const ad::Var& rows) const = 0;
    // t x k word embeddings of the tokens of `text`.
    virtual Eigen::MatrixXd embed_tokens(std::string_view text) const = 0;
    virtual const Vocabulary& vocabulary() const = 0;
};

Embedding encode_image(const ImageEncoder& enc, const Image& img);
Eigen::MatrixXd encode_images(const ImageEncoder& enc, const Eigen::MatrixXd& images);

Embedding encode_prompt_matrix(const TextEncoder& enc, const PromptMatrix& M);
// Differentiable in prompt_vectors.
ad::Var encode_prompt_matrix(const TextEncoder& enc, const ad::Var& prompt_vectors,
                             const Eigen::MatrixXd& label_tokens);

Embedding encode_text(const TextEncoder& enc, std::string_view text);

// Mean of encode_text over every template filled with the label text.
Embedding encode_label_averaged(const TextEncoder& enc, const DomainLabel& label,
                                std::span<const std::string> templates);

NearestWord nearest_word(const TextEncoder& enc, const Eigen::VectorXd& v);

}  // namespace ipl
