// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/cli/run_manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "ipl/core/error.hpp"
#include "ipl/core/rng.hpp"

namespace ipl {

namespace {

std::string hash_json(const nlohmann::json& j) {
    return fmt::format("{:016x}", fnv1a64(j.dump()));
}

}  // namespace

std::string config_hash(const RunConfig& cfg) {
    return hash_json(config_to_json(cfg));
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest RunManifest::begin(std::string stage, const RunConfig& cfg) {
    RunManifest m;
    m.stage = std::move(stage);
    m.config = config_to_json(cfg);
    m.config_hash = hash_json(m.config);
    m.run_id = fmt::format("{}-{}-s{}", m.stage, m.config_hash.substr(0, 8), cfg.seed);
    m.started_at = utc_timestamp();
    return m;
}

void RunManifest::finish() {
    finished_at = utc_timestamp();
}

void save_run_manifest(const RunManifest& m, const std::filesystem::path& path) {
    const nlohmann::json j = {
        {"run_id", m.run_id},
        {"stage", m.stage},
        {"config_hash", m.config_hash},
        {"started_at", m.started_at},
        {"finished_at", m.finished_at},
        {"checkpoints", m.checkpoints},
        {"final_metrics", m.final_metrics},
        {"config", m.config},
    };
    std::ofstream out(path, std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) {
        throw Error(fmt::format("cannot write {}", path.string()));
    }
}

RunManifest load_run_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open run manifest '{}'", path.string()));
    }
    RunManifest m;
    try {
        const auto j = nlohmann::json::parse(in);
        m.run_id = j.at("run_id").get<std::string>();
        m.stage = j.at("stage").get<std::string>();
        m.config_hash = j.at("config_hash").get<std::string>();
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
        m.checkpoints = j.at("checkpoints").get<std::vector<std::string>>();
        m.final_metrics = j.at("final_metrics");
        m.config = j.at("config");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
    if (hash_json(m.config) != m.config_hash) {
        throw ValidationError(fmt::format("{}: config hash {} does not match the stored config ({})", path.string(),
                                          m.config_hash, hash_json(m.config)));
    }
    return m;
}

}  // namespace ipl
