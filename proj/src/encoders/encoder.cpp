// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/encoders/encoder.hpp"

#include <cctype>

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/encoders/templates.hpp"

namespace ipl {

void Vocabulary::add(std::string word, Eigen::VectorXd vector) {
    if (!entries_.empty() && vector.size() != entries_.front().vector.size()) {
        throw DimensionError(fmt::format("vocabulary word '{}' has dimension {}, expected {}", word, vector.size(),
                                         entries_.front().vector.size()));
    }
    if (find(word) != nullptr) {
        throw PreconditionError(fmt::format("duplicate vocabulary word '{}'", word));
    }
    entries_.push_back({std::move(word), std::move(vector)});
}

const Eigen::VectorXd* Vocabulary::find(std::string_view word) const {
    for (const auto& e : entries_) {
        if (e.word == word) {
            return &e.vector;
        }
    }
    return nullptr;
}

NearestWord nearest_word(const Vocabulary& vocab, const Eigen::VectorXd& v) {
    if (vocab.empty()) {
        throw PreconditionError("nearest_word: empty vocabulary");
    }
    const auto k = vocab.entries().front().vector.size();
    if (v.size() != k) {
        throw DimensionError(fmt::format("nearest_word: vector has dimension {}, vocabulary has {}", v.size(), k));
    }
    const Vocabulary::Entry* best = nullptr;
    double best_dist = 0.0;
    for (const auto& e : vocab.entries()) {
        const double d = (e.vector - v).norm();
        if (best == nullptr || d < best_dist || (d == best_dist && e.word < best->word)) {
            best = &e;
            best_dist = d;
        }
    }
    return {best->word, best_dist};
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        std::size_t b = 0;
        std::size_t e = current.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(current[b]))) {
            ++b;
        }
        while (e > b && std::ispunct(static_cast<unsigned char>(current[e - 1]))) {
            --e;
        }
        if (e > b) {
            out.push_back(current.substr(b, e - b));
        }
        current.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return out;
}

Embedding encode_image(const ImageEncoder& enc, const Image& img) {
    if (!(img.shape == enc.input_shape()) || img.pixels.size() != enc.input_shape().size()) {
        throw DimensionError(fmt::format("image shape {}x{} does not match encoder input {}x{}", img.shape.height,
                                         img.shape.width, enc.input_shape().height, enc.input_shape().width));
    }
    if (!img.pixels.allFinite()) {
        throw PreconditionError("image has non-finite entries");
    }
    return enc.encode(ad::Var::constant(img.pixels.transpose())).value().row(0).transpose();
}

Eigen::MatrixXd encode_images(const ImageEncoder& enc, const Eigen::MatrixXd& images) {
    if (images.cols() != enc.input_shape().size()) {
        throw DimensionError(fmt::format("images have {} pixels, encoder expects {}", images.cols(),
                                         enc.input_shape().size()));
    }
    return enc.encode(ad::Var::constant(images)).value();
}

Embedding encode_prompt_matrix(const TextEncoder& enc, const PromptMatrix& M) {
    if (M.k() != enc.dim()) {
        throw DimensionError(fmt::format("prompt matrix rows have k={}, encoder has k={}", M.k(), enc.dim()));
    }
    return enc.encode_rows(ad::Var::constant(M.concatenated())).value().row(0).transpose();
}

ad::Var encode_prompt_matrix(const TextEncoder& enc, const ad::Var& prompt_vectors,
                             const Eigen::MatrixXd& label_tokens) {
    if (prompt_vectors.cols() != enc.dim() || label_tokens.cols() != enc.dim()) {
        throw DimensionError(fmt::format("prompt matrix rows have k={}/{}, encoder has k={}", prompt_vectors.cols(),
                                         label_tokens.cols(), enc.dim()));
    }
    const ad::Var parts[] = {prompt_vectors, ad::Var::constant(label_tokens)};
    return enc.encode_rows(ad::concat_rows(parts));
}

Embedding encode_text(const TextEncoder& enc, std::string_view text) {
    return enc.encode_rows(ad::Var::constant(enc.embed_tokens(text))).value().row(0).transpose();
}

Embedding encode_label_averaged(const TextEncoder& enc, const DomainLabel& label,
                                std::span<const std::string> templates) {
    if (templates.empty()) {
        throw PreconditionError("encode_label_averaged: template list is empty");
    }
    Embedding acc = Embedding::Zero(enc.dim());
    for (const auto& t : templates) {
        acc += encode_text(enc, fill_template(t, label.text()));
    }
    return acc / static_cast<double>(templates.size());
}

NearestWord nearest_word(const TextEncoder& enc, const Eigen::VectorXd& v) {
    return nearest_word(enc.vocabulary(), v);
}

}  // namespace ipl
