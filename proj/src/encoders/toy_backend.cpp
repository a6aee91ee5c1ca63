// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/encoders/toy_backend.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/core/rng.hpp"

namespace ipl {

namespace {

// Gain of the text projection. W is a seeded orthogonal matrix times this.
constexpr double kToyTextGain = 3.0;

}  // namespace

const std::vector<std::string>& toy_vocabulary_words() {
    static const std::vector<std::string> words = {
        "a",        "an",       "the",     "of",       "photo",    "picture",  "drawing",  "painting",
        "sketch",   "sculpture", "art",    "style",    "human",    "person",   "face",     "portrait",
        "dog",      "cat",      "animal",  "disney",   "anime",    "wall",     "ukiyo-e",  "pixar",
        "character", "tolkien", "elf",     "werewolf", "cartoon",  "pointillism", "cubism", "young",
        "old",      "elder",    "smiling", "hair",     "curly",    "eyes",     "ears",     "round",
        "pointed",  "glasses",  "lady",    "man",      "girl",     "boy",      "asian",    "blue",
        "red",      "green",    "black",   "white",    "bright",   "dark",     "good",     "bad",
        "small",    "large",    "toy",     "video",    "game",     "ant",      "bee",      "emotion",
    };
    return words;
}

ToyImageEncoder::ToyImageEncoder(std::uint64_t seed, ImageShape shape, int k) : shape_(shape) {
    if (shape.height < 1 || shape.width < 1 || k < 1) {
        throw PreconditionError(fmt::format("toy image encoder needs positive dims, got {}x{} -> {}", shape.height,
                                            shape.width, k));
    }
    Rng rng = Rng(seed).derive("toy.image.projection");
    projection_ = rng.normal_matrix(k, shape.size(), 1.0 / std::sqrt(static_cast<double>(shape.size())));
}

ad::Var ToyImageEncoder::encode(const ad::Var& images) const {
    if (images.cols() != shape_.size()) {
        throw DimensionError(fmt::format("toy image encoder expects {} pixels, got {}", shape_.size(), images.cols()));
    }
    return ad::linear(images, ad::Var::constant(projection_), ad::Var::constant(Eigen::MatrixXd::Zero(1, dim())));
}

ToyTextEncoder::ToyTextEncoder(std::uint64_t seed, int k) : seed_(seed) {
    if (k < 1) {
        throw PreconditionError("toy text encoder needs k >= 1");
    }
    Rng rng = Rng(seed).derive("toy.text.weight");
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(rng.normal_matrix(k, k, 1.0));
    Eigen::MatrixXd q = qr.householderQ();
    for (int j = 0; j < k; ++j) {
        if (qr.matrixQR()(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    weight_ = kToyTextGain * q;
    for (const auto& w : toy_vocabulary_words()) {
        vocab_.add(w, embed_word(w));
    }
}

Eigen::VectorXd ToyTextEncoder::embed_word(std::string_view word) const {
    Rng rng = Rng(seed_).derive(fmt::format("toy.word:{}", word));
    Eigen::VectorXd v = rng.normal_matrix(dim(), 1);
    return v / v.norm();
}

ad::Var ToyTextEncoder::encode_rows(const ad::Var& rows) const {
    if (rows.cols() != dim()) {
        throw DimensionError(fmt::format("toy text encoder expects rows of dimension {}, got {}", dim(), rows.cols()));
    }
    const auto pooled = ad::mean_rows(rows);
    const auto pre = ad::matmul(pooled, ad::Var::constant(weight_.transpose()));
    return ad::softsign(pre);
}

Eigen::MatrixXd ToyTextEncoder::embed_tokens(std::string_view text) const {
    const auto tokens = tokenize(text);
    if (tokens.empty()) {
        throw ValidationError(fmt::format("text '{}' has no tokens", text));
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(tokens.size()), dim());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = embed_word(tokens[i]).transpose();
    }
    return out;
}

}  // namespace ipl
