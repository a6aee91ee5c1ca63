// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/cli/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ipl/core/error.hpp"

namespace ipl {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMapperArchitecture = "latent_mapper_fc4";

std::string tensor_file(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                           c == '_' || c == '-';
        out += plain ? c : '_';
    }
    return out + ".bin";
}

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((v & 0xffU) << 24) | ((v & 0xff00U) << 8) | ((v >> 8) & 0xff00U) | (v >> 24);
    }
    return v;
}

std::vector<char> encode_tensor(const Eigen::MatrixXd& m) {
    std::vector<char> bytes(static_cast<std::size_t>(m.size()) * 4);
    std::size_t off = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c))));
            std::memcpy(bytes.data() + off, &bits, 4);
            off += 4;
        }
    }
    return bytes;
}

Eigen::MatrixXd decode_tensor(const std::vector<char>& bytes, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    std::size_t off = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            std::uint32_t bits = 0;
            std::memcpy(&bits, bytes.data() + off, 4);
            off += 4;
            m(r, c) = static_cast<double>(std::bit_cast<float>(to_le(bits)));
        }
    }
    return m;
}

}  // namespace

Eigen::MatrixXd to_float32(const Eigen::MatrixXd& m) {
    return m.cast<float>().cast<double>();
}

void save_archive(const TensorArchive& archive, const fs::path& dir) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir);
    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& e : archive.tensors.entries()) {
        const std::string file = tensor_file(e.name);
        const auto bytes = encode_tensor(e.value);
        std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw Error(fmt::format("cannot write {}", (dir / file).string()));
        }
        tensors.push_back({{"name", e.name}, {"file", file}, {"shape", {e.value.rows(), e.value.cols()}},
                           {"dtype", "float32"}});
    }
    const nlohmann::json manifest = {
        {"format_version", kArchiveFormatVersion},
        {"kind", archive.kind},
        {"architecture", archive.architecture},
        {"architecture_spec", archive.architecture_spec},
        {"config", archive.config},
        {"seed", archive.seed},
        {"tensors", tensors},
    };
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if (!out) {
        throw Error(fmt::format("cannot write {}", (dir / "manifest.json").string()));
    }
}

TensorArchive load_archive(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::is_regular_file(manifest_path)) {
        throw ConfigError(fmt::format("no archive at '{}' (missing manifest.json)", dir.string()));
    }
    nlohmann::json j;
    try {
        std::ifstream in(manifest_path);
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IncompatibleError(fmt::format("{}: {}", manifest_path.string(), e.what()));
    }
    TensorArchive a;
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kArchiveFormatVersion) {
            throw IncompatibleError(fmt::format("{}: format_version {} is not supported (expected {})",
                                                manifest_path.string(), version, kArchiveFormatVersion));
        }
        a.kind = j.at("kind").get<std::string>();
        a.architecture = j.at("architecture").get<std::string>();
        a.architecture_spec = j.value("architecture_spec", nlohmann::json::object());
        a.config = j.value("config", nlohmann::json());
        a.seed = j.value("seed", std::uint64_t{0});
        for (const auto& t : j.at("tensors")) {
            const auto name = t.at("name").get<std::string>();
            const auto file = t.at("file").get<std::string>();
            const auto dtype = t.at("dtype").get<std::string>();
            const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
            if (dtype != "float32" || shape.size() != 2 || shape[0] < 0 || shape[1] < 0) {
                throw IncompatibleError(fmt::format("{}: tensor '{}' has unsupported dtype or shape", dir.string(),
                                                    name));
            }
            if (file.find('/') != std::string::npos || file.find("..") != std::string::npos) {
                throw IncompatibleError(fmt::format("{}: tensor file '{}' escapes the archive", dir.string(), file));
            }
            std::ifstream in(dir / file, std::ios::binary);
            if (!in) {
                throw IncompatibleError(fmt::format("{}: missing tensor file '{}'", dir.string(), file));
            }
            std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const auto expected = static_cast<std::size_t>(4 * shape[0] * shape[1]);
            if (bytes.size() != expected) {
                throw IncompatibleError(fmt::format("{}: tensor '{}' has {} bytes, expected {}", dir.string(), name,
                                                    bytes.size(), expected));
            }
            a.tensors.add(name, decode_tensor(bytes, shape[0], shape[1]));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IncompatibleError(fmt::format("{}: {}", manifest_path.string(), e.what()));
    }
    return a;
}

TensorArchive mapper_archive(const LatentMapper& F, const RunConfig& cfg) {
    TensorArchive a;
    a.kind = "latent_mapper";
    a.architecture = kMapperArchitecture;
    a.architecture_spec = {{"latent_dim", F.latent_dim}, {"hidden", F.hidden}, {"m", F.m}, {"k", F.k}};
    a.config = config_to_json(cfg);
    a.seed = cfg.seed;
    a.tensors = F.params;
    return a;
}

LatentMapper mapper_from_archive(const TensorArchive& archive) {
    if (archive.kind != "latent_mapper" || archive.architecture != kMapperArchitecture) {
        throw IncompatibleError(fmt::format("expected a {} mapper archive, got kind '{}' architecture '{}'",
                                            kMapperArchitecture, archive.kind, archive.architecture));
    }
    LatentMapper F;
    try {
        const auto& s = archive.architecture_spec;
        F = make_mapper(s.at("latent_dim").get<int>(), s.at("hidden").get<int>(), s.at("m").get<int>(),
                        s.at("k").get<int>());
    } catch (const nlohmann::json::exception& e) {
        throw IncompatibleError(fmt::format("bad mapper spec: {}", e.what()));
    } catch (const PreconditionError& e) {
        throw IncompatibleError(fmt::format("bad mapper spec: {}", e.what()));
    }
    const auto bad = F.params.mismatches(archive.tensors);
    if (!bad.empty()) {
        throw IncompatibleError(fmt::format("mapper archive tensors do not match its spec: {}", fmt::join(bad, ", ")));
    }
    F.params = archive.tensors;
    return F;
}

TensorArchive generator_archive(const Generator& gen, const RunConfig* cfg, std::uint64_t seed) {
    TensorArchive a;
    a.kind = "generator";
    a.architecture = gen.architecture();
    a.architecture_spec = gen.architecture_spec();
    a.config = cfg ? config_to_json(*cfg) : nlohmann::json();
    a.seed = seed;
    a.tensors = gen.parameters();
    return a;
}

std::unique_ptr<Generator> generator_from_archive(const TensorArchive& archive) {
    if (archive.kind != "generator") {
        throw IncompatibleError(fmt::format("expected a generator archive, got kind '{}'", archive.kind));
    }
    auto spec = archive.architecture_spec;
    spec["architecture"] = archive.architecture;
    return make_generator(spec, archive.tensors);
}

}  // namespace ipl
