// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ipl/cli/archive.hpp"
#include "ipl/cli/commands.hpp"
#include "ipl/cli/csv.hpp"
#include "ipl/cli/png.hpp"
#include "ipl/cli/run_manifest.hpp"
#include "ipl/core/error.hpp"
#include "ipl/generators/toy_generator.hpp"
#include "test_util.hpp"

using namespace ipl;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliResult r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path small_config(const fs::path& dir) {
    RunConfig cfg;
    cfg.n_stage1 = 8;
    cfg.iters_stage1 = 12;
    cfg.iters_stage2 = 12;
    cfg.checkpoint_every = 6;
    fs::create_directories(dir);
    const fs::path p = dir / "config.json";
    save_config(cfg, p);
    return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        rows.push_back(csv_split(line));
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("archive round trip is exact and re-saves byte-identically") {
    const fs::path dir = test::temp_dir("cli_archive");
    ToyGenerator g(3, 4, {3, 3}, 5);
    const RunConfig cfg;
    const TensorArchive a = generator_archive(g, &cfg, 7);
    save_archive(a, dir / "a");
    const TensorArchive b = load_archive(dir / "a");
    CHECK(b.kind == "generator");
    CHECK(b.seed == 7);
    CHECK(b.tensors.names() == a.tensors.names());
    for (const auto& e : a.tensors.entries()) {
        CHECK(b.tensors.at(e.name) == to_float32(e.value));
    }
    save_archive(b, dir / "b");
    for (const auto& f : fs::directory_iterator(dir / "a")) {
        CHECK(test::read_file(f.path()) == test::read_file(dir / "b" / f.path().filename()));
    }
    auto rebuilt = generator_from_archive(b);
    CHECK(rebuilt->architecture() == "toy_mlp2");

    CHECK_THROWS_AS(load_archive(dir / "missing"), ConfigError);
    std::ofstream(dir / "a" / "fc1.weight.bin", std::ios::trunc) << "xx";
    CHECK_THROWS_AS(load_archive(dir / "a"), IncompatibleError);
}

TEST_CASE("run manifest stores the config hash and rejects tampering") {
    const fs::path dir = test::temp_dir("cli_manifest");
    RunConfig cfg;
    auto m = RunManifest::begin("stage1", cfg);
    m.finish();
    CHECK(m.config_hash == config_hash(cfg));
    CHECK(m.config_hash.size() == 16);
    save_run_manifest(m, dir / "manifest.json");
    const auto back = load_run_manifest(dir / "manifest.json");
    CHECK(back.run_id == m.run_id);
    RunConfig other = cfg;
    other.m = 8;
    CHECK(config_hash(other) != config_hash(cfg));

    auto j = nlohmann::json::parse(test::read_file(dir / "manifest.json"));
    j["config"]["m"] = 7;
    std::ofstream(dir / "manifest.json", std::ios::trunc) << j.dump(2);
    CHECK_THROWS_AS(load_run_manifest(dir / "manifest.json"), ValidationError);
}

TEST_CASE("PNG round trip") {
    const fs::path dir = test::temp_dir("cli_png");
    Canvas c(5, 3);
    c.set(1, 1, {10, 20, 30});
    c.line(0, 2, 4, 2, {200, 0, 0});
    write_png(c, dir / "x.png");
    const Canvas r = read_png(dir / "x.png");
    CHECK(r.width == 5);
    CHECK(r.height == 3);
    CHECK(r.rgb == c.rgb);
}

TEST_CASE("csv helpers") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("q\"x") == "\"q\"\"x\"");
    CHECK(csv_split("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
    CHECK(std::stod(csv_number(0.1)) == 0.1);
    CHECK(parse_number_list("1, 2 3") == std::vector<double>{1, 2, 3});
}

TEST_CASE("missing config exits 1 and names the path") {
    const fs::path dir = test::temp_dir("cli_missing");
    const auto r = cli({"train-mapper", "--config", (dir / "nope.json").string(), "--out", (dir / "o").string()});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("nope.json") != std::string::npos);
    CHECK(cli({"no-such-command"}).code == kExitConfig);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("train-mapper writes its outputs and is reproducible") {
    const fs::path dir = test::temp_dir("cli_train");
    const fs::path cfg = small_config(dir);
    const auto r1 = cli({"train-mapper", "--config", cfg.string(), "--out", (dir / "r1").string()});
    REQUIRE(r1.code == kExitOk);
    const auto r2 = cli({"train-mapper", "--config", cfg.string(), "--out", (dir / "r2").string()});
    REQUIRE(r2.code == kExitOk);
    for (const char* f : {"mapper.archive", "stage1_loss.csv", "manifest.json", "checkpoints"}) {
        CHECK(fs::exists(dir / "r1" / f));
    }
    CHECK(fs::exists(dir / "r1" / "checkpoints" / "mapper_it00006.archive"));
    CHECK(fs::exists(dir / "r1" / "checkpoints" / "mapper_it00012.archive"));
    CHECK(test::read_file(dir / "r1" / "stage1_loss.csv") == test::read_file(dir / "r2" / "stage1_loss.csv"));
    for (const auto& f : fs::directory_iterator(dir / "r1" / "mapper.archive")) {
        CHECK(test::read_file(f.path()) == test::read_file(dir / "r2" / "mapper.archive" / f.path().filename()));
    }
    const auto rows = read_csv(dir / "r1" / "stage1_loss.csv");
    CHECK(rows.size() == 13);
    CHECK(rows[0][0] == "iteration");
    const auto a = load_archive(dir / "r1" / "mapper.archive");
    CHECK(a.kind == "latent_mapper");

    const auto r3 = cli({"train-mapper", "--config", cfg.string(), "--out", (dir / "r3").string(), "--seed", "5"});
    REQUIRE(r3.code == kExitOk);
    CHECK(test::read_file(dir / "r1" / "stage1_loss.csv") != test::read_file(dir / "r3" / "stage1_loss.csv"));
}

TEST_CASE("adapt, synthesize, interpolate") {
    const fs::path dir = test::temp_dir("cli_adapt");
    const fs::path cfg = small_config(dir);
    REQUIRE(cli({"train-mapper", "--config", cfg.string(), "--out", (dir / "tm").string()}).code == kExitOk);

    // adaptive without a mapper is a configuration error
    CHECK(cli({"adapt", "--config", cfg.string(), "--out", (dir / "x").string(), "--scheme", "adaptive"}).code ==
          kExitConfig);

    const auto ad = cli({"adapt", "--config", cfg.string(), "--out", (dir / "ad").string(), "--mapper",
                         (dir / "tm" / "mapper.archive").string()});
    REQUIRE(ad.code == kExitOk);
    CHECK(fs::exists(dir / "ad" / "generator.archive"));
    CHECK(read_csv(dir / "ad" / "stage2_loss.csv").size() == 13);

    const auto man = cli({"adapt", "--config", cfg.string(), "--out", (dir / "man").string(), "--scheme",
                          "manual_fixed"});
    REQUIRE(man.code == kExitOk);
    const auto rows = read_csv(dir / "man" / "stage2_loss.csv");
    REQUIRE(rows.size() == 13);
    std::size_t col = 0;
    while (rows[0][col] != "delta_t_std") {
        ++col;
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][col]) == 0.0);
    }

    RunConfig wrong;
    wrong.latent_dim = 6;
    save_config(wrong, dir / "wrong.json");
    CHECK(cli({"adapt", "--config", (dir / "wrong.json").string(), "--out", (dir / "y").string(), "--mapper",
               (dir / "tm" / "mapper.archive").string()})
              .code == kExitRuntime);

    const std::string gen = (dir / "ad" / "generator.archive").string();
    const std::string w1 = "0.5,-1,0.25,2,0,0,1,-0.5";
    const std::string w2 = "-1,1,0,0.5,0.5,-2,0,1";
    REQUIRE(cli({"synthesize", "--generator", gen, "--w", w1, "--w", w2, "--out", (dir / "sy").string()}).code ==
            kExitOk);
    CHECK(fs::exists(dir / "sy" / "sample_000.png"));
    CHECK(fs::exists(dir / "sy" / "montage.png"));
    const auto synth = load_archive(dir / "sy" / "images.archive").tensors.at("images");
    REQUIRE(synth.rows() == 2);

    REQUIRE(cli({"interpolate", "--generator", gen, "--mode", "latent", "--w1", w1, "--w2", w2, "--steps", "5",
                 "--out", (dir / "ip").string()})
                .code == kExitOk);
    const auto ip = load_archive(dir / "ip" / "images.archive");
    const auto& imgs = ip.tensors.at("images");
    REQUIRE(imgs.rows() == 5);
    CHECK(imgs.row(0) == synth.row(0));
    CHECK(imgs.row(4) == synth.row(1));
    CHECK(ip.tensors.at("alphas")(0, 2) == doctest::Approx(0.5));

    const std::string src = (dir / "man" / "generator.archive").string();
    REQUIRE(cli({"interpolate", "--generator", src, "--generator2", gen, "--mode", "model", "--steps", "3", "--n",
                 "2", "--out", (dir / "mi").string()})
                .code == kExitOk);
    const auto mi = load_archive(dir / "mi" / "images.archive");
    CHECK(mi.tensors.at("alphas").cols() == 3);
    CHECK(mi.tensors.at("images").rows() == 6);

    // A generator of a different shape cannot be blended.
    ToyGenerator odd(1, 8, {8, 8}, 7);
    save_archive(generator_archive(odd, nullptr, 0), dir / "odd.archive");
    const auto bad = cli({"interpolate", "--generator", src, "--generator2", (dir / "odd.archive").string(),
                          "--mode", "model", "--out", (dir / "bad").string()});
    CHECK(bad.code == kExitRuntime);
    CHECK(bad.err.find("fc1") != std::string::npos);
}

TEST_CASE("ablate: m sweep rows, word dump, plots") {
    const fs::path dir = test::temp_dir("cli_ablate");
    const fs::path cfg = small_config(dir);
    const auto r = cli({"ablate", "--config", cfg.string(), "--schemes", "adaptive", "--sweep", "m:1,2,4,8,16",
                        "--dump-words", "--eval-samples", "8", "--out", (dir / "ab").string()});
    REQUIRE(r.code == kExitOk);
    const auto rows = read_csv(dir / "ab" / "report.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == kAblationColumns);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][3] == "ok");
    }
    CHECK(fs::exists(dir / "ab" / "diversity_vs_m.png"));
    CHECK(fs::exists(dir / "ab" / "similarity.png"));
    const auto words = read_csv(dir / "ab" / "words.csv");
    CHECK(words.size() > 1);

    CHECK(cli({"ablate", "--config", cfg.string(), "--sweep", "q:1", "--out", (dir / "bad").string()}).code ==
          kExitConfig);
}

TEST_CASE("evaluate writes one row per metric and scheme") {
    const fs::path dir = test::temp_dir("cli_eval");
    const fs::path cfg = small_config(dir);
    const auto r = cli({"evaluate", "--config", cfg.string(), "--schemes", "manual_fixed,adaptive", "--n", "8",
                        "--out", (dir / "ev").string()});
    REQUIRE(r.code == kExitOk);
    const auto rows = read_csv(dir / "ev" / "metrics.csv");
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == kMetricColumns);
    int adaptive = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        adaptive += rows[i][2] == "adaptive";
    }
    CHECK(adaptive >= 4);
}

}  // TEST_SUITE
