// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipl/core/config.hpp"

namespace ipl {

// 16 hex digits of FNV-1a over the compact JSON form of the config.
std::string config_hash(const RunConfig& cfg);

struct RunManifest {
    std::string run_id;
    std::string stage;
    std::string config_hash;
    std::string started_at;  // UTC, ISO 8601
    std::string finished_at;
    std::vector<std::string> checkpoints;  // paths relative to the run directory
    nlohmann::json final_metrics = nlohmann::json::object();
    nlohmann::json config;

    static RunManifest begin(std::string stage, const RunConfig& cfg);
    void finish();
};

std::string utc_timestamp();

void save_run_manifest(const RunManifest& manifest, const std::filesystem::path& path);
// ValidationError when the stored hash does not match the stored config.
RunManifest load_run_manifest(const std::filesystem::path& path);

}  // namespace ipl
