// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../unit/test_util.hpp"
#include "ipl/cli/archive.hpp"
#include "ipl/cli/commands.hpp"
#include "ipl/cli/csv.hpp"
#include "ipl/encoders/toy_backend.hpp"
#include "ipl/generators/toy_generator.hpp"
#include "ipl/losses/losses.hpp"
#include "ipl/mapper/mapper.hpp"
#include "ipl/metrics/metrics.hpp"
#include "ipl/training/backend.hpp"
#include "ipl/training/diagnostics.hpp"
#include "ipl/training/optim.hpp"
#include "ipl/training/pipeline.hpp"

using namespace ipl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, std::string what) {
        if (!ok) {
            pass = false;
        }
        notes.push_back((ok ? "" : "[x] ") + std::move(what));
    }
};

constexpr int kSeeds = 5;

// Toy acceptance setting: k = 16, m = 4, lambda = 1, 300 + 300 iterations,
// n = 8 in Stage 1. Seeds vary the run and the backend together.
RunConfig seed_config(int s) {
    RunConfig cfg;
    cfg.n_stage1 = 8;
    cfg.seed = static_cast<std::uint64_t>(s);
    cfg.backend_seed = static_cast<std::uint64_t>(s);
    return cfg;
}

double tail_mean(const std::vector<double>& v, std::size_t count) {
    count = std::min(count, v.size());
    double acc = 0.0;
    for (std::size_t i = v.size() - count; i < v.size(); ++i) {
        acc += v[i];
    }
    return acc / static_cast<double>(count);
}

double head_mean(const std::vector<double>& v, std::size_t count) {
    count = std::min(count, v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        acc += v[i];
    }
    return acc / static_cast<double>(count);
}

// AC1 ------------------------------------------------------------------------

Verdict ac1() {
    Verdict v;
    const auto t0 = Clock::now();
    constexpr double tol = 1e-4;
    Rng rng(101);
    const int n = 4, k = 8, m = 2, dw = 8;
    auto check = [&](const std::string& name, double err) {
        v.require(err < tol, fmt::format("{} rel err {:.2e}", name, err));
    };

    const Eigen::MatrixXd I = rng.normal_matrix(n, k), T = rng.normal_matrix(n, k), S0 = rng.normal_matrix(n, k);
    const Eigen::VectorXd label = rng.normal_matrix(k, 1);
    check("contrastive wrt image embs", test::fd_relative_error(
        [&](const ad::Var& x) { return contrastive_loss(similarity_matrix(x, ad::Var::constant(T))); }, I));
    check("contrastive wrt text embs", test::fd_relative_error(
        [&](const ad::Var& x) { return contrastive_loss(similarity_matrix(ad::Var::constant(I), x)); }, T));
    check("domain", test::fd_relative_error([&](const ad::Var& x) { return domain_regularization_loss(x, label); }, T));
    check("mapper_loss", test::fd_relative_error(
        [&](const ad::Var& x) {
            return mapper_loss(similarity_matrix(ad::Var::constant(I), x), x, label, 2.5);
        },
        T));
    check("adaptive directional", test::fd_relative_error(
        [&](const ad::Var& x) {
            return adaptive_directional_loss(direction_rows(ad::Var::constant(S0), x),
                                             direction_rows(ad::Var::constant(S0), ad::Var::constant(T)))
                .loss;
        },
        I));

    const ToyImageEncoder img_enc(3, {3, 3}, k);
    check("image encoder", test::fd_relative_error(
        [&](const ad::Var& x) { return test::project(img_enc.encode(x)); }, rng.normal_matrix(n, 9)));
    const ToyTextEncoder txt_enc(3, k);
    check("text encoder", test::fd_relative_error(
        [&](const ad::Var& x) { return test::project(txt_enc.encode_rows(x)); }, rng.normal_matrix(m + 2, k)));

    RunConfig cfg;
    cfg.embed_dim = k;
    cfg.latent_dim = dw;
    cfg.m = m;
    Rng init(5);
    LatentMapper F = init_mapper(cfg, txt_enc, init);
    for (auto& e : F.params.entries()) {
        e.value += rng.normal_matrix(e.value.rows(), e.value.cols(), 0.1);
    }
    const Eigen::MatrixXd w = rng.normal_matrix(n, dw);
    check("mapper wrt theta", test::fd_params_error(
        [&](const BoundParameters& b) { return test::project(F.forward(b, ad::Var::constant(w))); }, F.params));
    check("mapper wrt w", test::fd_relative_error(
        [&](const ad::Var& x) { return test::project(F.forward(BoundParameters(F.params, false), x)); }, w));

    ToyGenerator gen(4, dw, {3, 3}, 6);
    for (auto& e : gen.mutable_parameters().entries()) {
        e.value = rng.normal_matrix(e.value.rows(), e.value.cols(), 0.5);
    }
    check("generator wrt theta", test::fd_params_error(
        [&](const BoundParameters& b) { return test::project(gen.synthesize(b, ad::Var::constant(w))); },
        gen.parameters()));
    check("generator wrt w", test::fd_relative_error(
        [&](const ad::Var& x) { return test::project(gen.synthesize(BoundParameters(gen.parameters(), false), x)); },
        w));

    const double secs = seconds_since(t0);
    v.require(secs < 30.0, fmt::format("runtime {:.2f}s < 30s", secs));
    return v;
}

// AC2 ------------------------------------------------------------------------

Verdict ac2() {
    Verdict v;
    constexpr double tol = 1e-12;
    const double c = contrastive_loss(Eigen::MatrixXd::Identity(2, 2));
    v.require(std::abs(c + 2.0) <= tol, fmt::format("contrastive(I2) = {}", c));

    Eigen::VectorXd u(3), o(3);
    u << 0.3, -1.2, 2.0;
    o << 2.0, 0.5, 0.0;  // orthogonal to u
    const std::vector<DirectionPair> par{{u, u * 2.0}}, anti{{u, -u}}, orth{{u, o}};
    const double lp = adaptive_directional_loss(par).loss;
    const double la = adaptive_directional_loss(anti).loss;
    const double lo = adaptive_directional_loss(orth).loss;
    v.require(std::abs(lp) <= tol && std::abs(la - 2.0) <= tol && std::abs(lo - 1.0) <= tol,
              fmt::format("directional parallel {} anti {} orth {}", lp, la, lo));

    Eigen::MatrixXd e(1, 3);
    e << 0.3, -1.2, 2.0;
    const double d = domain_regularization_loss(ad::Var::constant(e), Eigen::VectorXd(e.row(0).transpose())).scalar();
    v.require(std::abs(d + 1.0) <= tol, fmt::format("domain(label, label) = {}", d));
    return v;
}

// AC3 ------------------------------------------------------------------------

Verdict ac3() {
    Verdict v;
    for (int C : {2, 5, 10}) {
        const double is = inception_score(Eigen::MatrixXd::Identity(C, C));
        v.require(std::abs(is - C) <= 1e-9, fmt::format("IS(one-hot x{}) = {}", C, is));
    }
    const FeatureStats a{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1)};
    const FeatureStats b{Eigen::VectorXd::Constant(1, 2.0), Eigen::MatrixXd::Ones(1, 1)};
    const double fd = frechet_distance(a, b);
    v.require(std::abs(fd - 4.0) <= 1e-9, fmt::format("frechet 1-D = {}", fd));
    Rng rng(3);
    const Eigen::MatrixXd x = rng.normal_matrix(36, 8);
    const double s = sifid(x, x);
    v.require(std::abs(s) <= 1e-8, fmt::format("sifid(x, x) = {:.3e}", s));
    const Eigen::VectorXd idv = rng.normal_matrix(16, 1);
    const double id = identity_similarity(idv, idv);
    v.require(std::abs(id - 1.0) <= 1e-12, fmt::format("identity(x, x) = {}", id));
    return v;
}

// AC4 ------------------------------------------------------------------------

Verdict ac4() {
    Verdict v;
    const auto t0 = Clock::now();
    std::vector<double> adaptive_std;
    bool fixed_zero = true;
    for (int s = 0; s < kSeeds; ++s) {
        const RunConfig cfg = seed_config(s);
        const Backend backend = make_toy_backend(cfg);
        for (auto kind : {PromptSchemeKind::manual_fixed, PromptSchemeKind::learned_fixed}) {
            const auto r = run_pipeline(cfg, kind, backend);
            for (const auto& rec : r.stage2.trace) {
                fixed_zero = fixed_zero && rec.delta_t_std == 0.0;
            }
        }
        const auto r = run_pipeline(cfg, PromptSchemeKind::adaptive, backend);
        std::vector<double> per_iter;
        for (const auto& rec : r.stage2.trace) {
            per_iter.push_back(rec.delta_t_std);
        }
        adaptive_std.push_back(median(per_iter));
    }
    v.require(fixed_zero, "fixed schemes: per-batch std(dT) == 0 at every iteration");
    const double med = median(adaptive_std);
    v.require(med > 1e-3, fmt::format("adaptive: seed-median per-batch std(dT) {:.4e} > 1e-3", med));
    const double secs = seconds_since(t0);
    v.require(secs < 120.0, fmt::format("runtime {:.1f}s < 120s", secs));
    return v;
}

// AC5 ------------------------------------------------------------------------

Verdict ac5() {
    Verdict v;
    const auto t0 = Clock::now();
    std::vector<double> gaps, drops;
    for (int s = 0; s < kSeeds; ++s) {
        const RunConfig cfg = seed_config(s);
        const Backend backend = make_toy_backend(cfg);
        std::vector<Stage1Record> trace;
        prepare_scheme(cfg, PromptSchemeKind::adaptive, backend, &trace);
        std::vector<double> gap, loss;
        for (const auto& r : trace) {
            gap.push_back(r.mean_diag_sim - r.mean_offdiag_sim);
            loss.push_back(r.l_total);
        }
        gaps.push_back(tail_mean(gap, 10));
        drops.push_back(loss.front() - tail_mean(loss, 10));
    }
    const double g = median(gaps), d = median(drops);
    v.require(g >= 0.2, fmt::format("seed-median final diag - offdiag sim {:.4f} >= 0.2", g));
    v.require(d > 0.0, fmt::format("seed-median loss drop (iter 1 - final 10 mean) {:.4f} > 0", d));
    const double secs = seconds_since(t0);
    v.require(secs < 120.0, fmt::format("runtime {:.1f}s < 120s", secs));
    return v;
}

// AC6 ------------------------------------------------------------------------

Verdict ac6() {
    Verdict v;
    const auto t0 = Clock::now();
    std::vector<double> med;
    for (double lambda : {0.0, 1.0, 10.0}) {
        std::vector<double> cos;
        for (int s = 0; s < kSeeds; ++s) {
            RunConfig cfg = seed_config(s);
            cfg.lambda = lambda;
            const Backend backend = make_toy_backend(cfg);
            std::vector<Stage1Record> trace;
            prepare_scheme(cfg, PromptSchemeKind::adaptive, backend, &trace);
            std::vector<double> c;
            for (const auto& r : trace) {
                c.push_back(r.mean_domain_cos);
            }
            cos.push_back(tail_mean(c, 10));
        }
        med.push_back(median(cos));
    }
    v.require(med[0] <= med[1] && med[1] <= med[2],
              fmt::format("domain cos at lambda 0/1/10: {:.4f} {:.4f} {:.4f}", med[0], med[1], med[2]));
    const double secs = seconds_since(t0);
    v.require(secs < 300.0, fmt::format("runtime {:.1f}s < 300s", secs));
    return v;
}

// AC7 ------------------------------------------------------------------------

Verdict ac7() {
    Verdict v;
    std::vector<double> ratios;
    bool ema_differs = true;
    for (int s = 0; s < kSeeds; ++s) {
        const RunConfig cfg = seed_config(s);
        const Backend backend = make_toy_backend(cfg);
        const auto r = run_pipeline(cfg, PromptSchemeKind::adaptive, backend);
        std::vector<double> loss;
        for (const auto& rec : r.stage2.trace) {
            loss.push_back(rec.l_adapt);
        }
        ratios.push_back(tail_mean(loss, 10) / head_mean(loss, 10));
        ema_differs = ema_differs && !(r.stage2.generator->parameters() == r.stage2.raw->parameters());
    }
    const double med = median(ratios);
    v.require(med <= 0.5, fmt::format("seed-median final-10 / first-10 L_adapt {:.4f} <= 0.5", med));
    v.require(ema_differs, "EMA copy differs from the raw iterate");

    // Constant-gradient walk p_t = p_0 - t c; shadow starts at p_0.
    // shadow_T = p_0 - c (T - d (1 - d^T) / (1 - d)).
    const double d = 0.99, c = 0.37, p0 = 1.5;
    const int T = 250;
    ParameterSet p;
    p.add("x", Eigen::MatrixXd::Constant(2, 3, p0));
    EmaTracker ema(p, d);
    for (int t = 1; t <= T; ++t) {
        p.at("x").array() -= c;
        ema.update(p);
    }
    const double closed = p0 - c * (T - d * (1.0 - std::pow(d, T)) / (1.0 - d));
    const double err = (ema.shadow().at("x").array() - closed).abs().maxCoeff();
    v.require(err <= 1e-10, fmt::format("EMA closed form error {:.2e} <= 1e-10", err));
    return v;
}

// AC8 ------------------------------------------------------------------------

Verdict ac8() {
    Verdict v;
    std::vector<double> ad, man;
    int strict = 0;
    for (int s = 0; s < kSeeds; ++s) {
        const RunConfig cfg = seed_config(s);
        const Backend backend = make_toy_backend(cfg);
        PipelineOptions opts;
        opts.eval_samples = 32;
        const double a = run_pipeline(cfg, PromptSchemeKind::adaptive, backend, opts).diagnostics.diversity;
        const double m = run_pipeline(cfg, PromptSchemeKind::manual_fixed, backend, opts).diagnostics.diversity;
        ad.push_back(a);
        man.push_back(m);
        strict += a > m;
    }
    v.require(median(ad) >= median(man),
              fmt::format("seed-median diversity adaptive {:.5f} >= manual {:.5f}", median(ad), median(man)));
    v.require(strict >= 3, fmt::format("adaptive strictly more diverse in {}/5 seeds (need 3)", strict));
    return v;
}

// AC9 ------------------------------------------------------------------------

Verdict ac9() {
    Verdict v;
    Rng rng(9);
    bool latent_ok = true, model_ok = true;
    for (auto act : {GeneratorActivation::tanh, GeneratorActivation::linear}) {
        ToyGenerator g(1, 8, {8, 8}, 16, act);
        ToyGenerator h(2, 8, {8, 8}, 16, act);
        for (auto* gen : {&g, &h}) {
            for (auto& e : gen->mutable_parameters().entries()) {
                e.value = rng.normal_matrix(e.value.rows(), e.value.cols(), 0.3);
            }
        }
        const LatentCode w1(rng.normal_matrix(8, 1)), w2(rng.normal_matrix(8, 1));
        const std::vector<double> alphas{0.0, 0.25, 0.5, 1.0};
        const auto imgs = latent_interpolate(g, w1, w2, alphas);
        latent_ok = latent_ok && imgs.front().pixels == g.synthesize(w1).pixels &&
                    imgs.back().pixels == g.synthesize(w2).pixels;
        model_ok = model_ok && model_interpolate(g.parameters(), h.parameters(), 0.0) == g.parameters() &&
                   model_interpolate(g.parameters(), h.parameters(), 1.0) == h.parameters();
        if (act == GeneratorActivation::linear) {
            const Eigen::VectorXd avg = 0.5 * (g.synthesize(w1).pixels + g.synthesize(w2).pixels);
            const double err = (imgs[2].pixels - avg).cwiseAbs().maxCoeff();
            v.require(err <= 1e-12, fmt::format("linear midpoint error {:.2e} <= 1e-12", err));
        }
    }
    v.require(latent_ok, "latent interpolation endpoints bit-identical to synthesis");
    v.require(model_ok, "model interpolation endpoints bit-identical to parameter sets");
    return v;
}

// AC10 -----------------------------------------------------------------------

bool same_tree(const fs::path& a, const fs::path& b, std::vector<std::string>& diffs, bool skip_manifests) {
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) {
            continue;
        }
        const fs::path rel = fs::relative(e.path(), a);
        // Run manifests carry wall-clock timestamps.
        if (skip_manifests && rel == "manifest.json") {
            continue;
        }
        ++files;
        if (!fs::exists(b / rel) || test::read_file(e.path()) != test::read_file(b / rel)) {
            diffs.push_back(rel.string());
        }
    }
    return files > 0 && diffs.empty();
}

int quiet_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (code != kExitOk) {
        std::cerr << err.str();
    }
    return code;
}

Verdict ac10() {
    Verdict v;
    const fs::path dir = test::temp_dir("acceptance_repro");
    RunConfig cfg;
    save_config(cfg, dir / "config.json");
    const std::string conf = (dir / "config.json").string();
    for (const char* run : {"a", "b"}) {
        const fs::path root = dir / run;
        v.require(quiet_cli({"train-mapper", "--config", conf, "--out", (root / "tm").string()}) == kExitOk,
                  fmt::format("train-mapper run {}", run));
        v.require(quiet_cli({"adapt", "--config", conf, "--out", (root / "ad").string(), "--mapper",
                             (root / "tm" / "mapper.archive").string()}) == kExitOk,
                  fmt::format("adapt run {}", run));
    }
    for (const char* stage : {"tm", "ad"}) {
        std::vector<std::string> diffs;
        const bool same = same_tree(dir / "a" / stage, dir / "b" / stage, diffs, true);
        v.require(same, fmt::format("{}: checkpoints, archives and traces byte-identical{}", stage,
                                    diffs.empty() ? "" : " (differs: " + diffs.front() + ")"));
    }
    const TensorArchive loaded = load_archive(dir / "a" / "ad" / "generator.archive");
    save_archive(loaded, dir / "resaved.archive");
    std::vector<std::string> diffs;
    v.require(same_tree(dir / "a" / "ad" / "generator.archive", dir / "resaved.archive", diffs, false),
              "archive load/save round trip byte-identical");
    return v;
}

// AC11 -----------------------------------------------------------------------

Verdict ac11() {
    Verdict v;
    const auto t0 = Clock::now();
    const fs::path dir = test::temp_dir("acceptance_ablate");
    RunConfig cfg;
    save_config(cfg, dir / "config.json");
    const int code = quiet_cli({"ablate", "--config", (dir / "config.json").string(), "--schemes",
                                "manual_fixed,learned_fixed,random,adaptive", "--sweep", "lambda:0,1,10,20",
                                "--sweep", "m:1,2,4,8,16", "--out", (dir / "out").string()});
    v.require(code == kExitOk, fmt::format("ablate exit code {}", code));
    std::ifstream in(dir / "out" / "report.csv");
    std::string line;
    std::getline(in, line);
    v.require(csv_split(line) == kAblationColumns, "report header");
    int rows = 0, failed = 0;
    while (std::getline(in, line)) {
        const auto f = csv_split(line);
        ++rows;
        failed += f.size() != kAblationColumns.size() || f[3] != "ok";
    }
    v.require(rows == 36, fmt::format("{} rows (4 schemes x (4 lambda + 5 m) = 36)", rows));
    v.require(failed == 0, fmt::format("{} failed cells", failed));
    const double secs = seconds_since(t0);
    v.require(secs < 1800.0, fmt::format("runtime {:.1f}s < 1800s", secs));
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"AC1 gradient fidelity", ac1},
        {"AC2 loss oracles", ac2},
        {"AC3 metric closed forms", ac3},
        {"AC4 fixed vs adaptive directions", ac4},
        {"AC5 stage-1 convergence", ac5},
        {"AC6 domain regularization monotonicity", ac6},
        {"AC7 stage-2 training and EMA", ac7},
        {"AC8 diversity", ac8},
        {"AC9 interpolation exactness", ac9},
        {"AC10 reproducibility and persistence", ac10},
        {"AC11 ablation grid", ac11},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.require(false, fmt::format("exception: {}", e.what()));
        }
        failures += !v.pass;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name;
        for (const auto& n : v.notes) {
            std::cout << " | " << n;
        }
        std::cout << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
