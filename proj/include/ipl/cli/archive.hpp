// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// On-disk checkpoints. An archive is a directory holding manifest.json and one
// raw file per tensor: little-endian float32, row-major, no header.
//
//   manifest.json
//     format_version   1
//     kind             "latent_mapper" | "generator" | "prompts" | "images"
//     architecture     architecture id
//     architecture_spec, config, seed
//     tensors          [{name, file, shape: [rows, cols], dtype: "float32"}]

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "ipl/core/config.hpp"
#include "ipl/core/parameters.hpp"
#include "ipl/generators/generator.hpp"
#include "ipl/mapper/mapper.hpp"

namespace ipl {

inline constexpr int kArchiveFormatVersion = 1;

struct TensorArchive {
    std::string kind;
    std::string architecture;
    nlohmann::json architecture_spec = nlohmann::json::object();
    nlohmann::json config;  // null when no config applies
    std::uint64_t seed = 0;
    ParameterSet tensors;
};

// Replaces any existing archive at `dir`.
void save_archive(const TensorArchive& archive, const std::filesystem::path& dir);
// ConfigError if the directory or manifest is missing, IncompatibleError if
// the contents are malformed.
TensorArchive load_archive(const std::filesystem::path& dir);

TensorArchive mapper_archive(const LatentMapper& F, const RunConfig& cfg);
// IncompatibleError unless kind is "latent_mapper" and the tensors fit the spec.
LatentMapper mapper_from_archive(const TensorArchive& archive);

TensorArchive generator_archive(const Generator& gen, const RunConfig* cfg, std::uint64_t seed);
std::unique_ptr<Generator> generator_from_archive(const TensorArchive& archive);

// Float32 round trip, matching what an archive stores.
Eigen::MatrixXd to_float32(const Eigen::MatrixXd& m);

}  // namespace ipl
