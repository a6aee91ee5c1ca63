// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace ipl {

// Single-owner random stream. Every randomized operation in the toolkit draws
// from one of these; two streams built from the same seed produce the same
// sequence on a given platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal() { return normal_(engine_); }

    // rows x cols matrix of i.i.d. N(0, stddev^2) draws, filled row-major.
    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev = 1.0);

    // Independent child stream keyed by a tag; does not advance this stream.
    Rng derive(std::string_view tag) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

Rng seeded_rng(std::uint64_t seed);

// SplitMix64 finalizer; used to mix seeds with stream tags.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace ipl
