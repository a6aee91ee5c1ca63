// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/cli/commands.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ipl/cli/archive.hpp"
#include "ipl/cli/csv.hpp"
#include "ipl/cli/png.hpp"
#include "ipl/cli/run_manifest.hpp"
#include "ipl/core/error.hpp"
#include "ipl/losses/losses.hpp"
#include "ipl/metrics/extractors.hpp"
#include "ipl/metrics/metrics.hpp"
#include "ipl/training/diagnostics.hpp"
#include "ipl/training/pipeline.hpp"

namespace ipl {

namespace fs = std::filesystem;

namespace {

constexpr const char* kAllSchemes = "manual_fixed,learned_fixed,random,adaptive";
constexpr int kToyClasses = 10;
constexpr int kToySpatialDim = 8;
constexpr int kToyIdentityDim = 16;

struct Common {
    std::string config;
    std::string out;
    std::string backend = "toy";
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* sub, Common& c, bool with_config = true) {
    if (with_config) {
        sub->add_option("--config", c.config, "Run config (JSON)")->required();
        sub->add_option("--backend", c.backend, "Backend providing encoders and source generator")
            ->capture_default_str();
    }
    sub->add_option("--out", c.out, "Output directory")->required();
    c.seed_opt = sub->add_option("--seed", c.seed, "Override the config seed");
}

RunConfig load_run_config(const Common& c, std::ostream& err) {
    RunConfig cfg = load_config(c.config);
    if (c.seed_opt && c.seed_opt->count() > 0) {
        cfg.seed = c.seed;
    }
    validate(cfg);
    if (cfg.lambda_from_table && cfg.n_stage1 != 32) {
        err << fmt::format("warning: lambda {} comes from the per-domain table, which assumes n_stage1 = 32 "
                           "(config has {}); the losses are per-batch sums\n",
                           cfg.lambda, cfg.n_stage1);
    }
    return cfg;
}

fs::path prepare_out(const std::string& out) {
    const fs::path dir = resolve_output(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ConfigError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    }
    return dir;
}

std::vector<PromptSchemeKind> parse_schemes(const std::string& list) {
    std::vector<PromptSchemeKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(parse_prompt_scheme(item));
        }
    }
    if (out.empty()) {
        throw ConfigError("--schemes is empty");
    }
    return out;
}

Image image_row(const Eigen::MatrixXd& images, Eigen::Index i, ImageShape shape) {
    return Image{shape, images.row(i).transpose()};
}

std::string domain_pair_key(const RunConfig& cfg) {
    return cfg.source_label + "→" + cfg.target_label;
}

Eigen::MatrixXd stack_rows(const std::vector<std::vector<double>>& rows, int dim) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<int>(rows[i].size()) != dim) {
            throw DimensionError(fmt::format("latent {} has {} values, generator expects {}", i, rows[i].size(), dim));
        }
        for (int j = 0; j < dim; ++j) {
            m(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
        }
    }
    return m;
}

Eigen::MatrixXd images_matrix(const std::vector<Image>& images) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(images.size()), images.empty() ? 0 : images[0].pixels.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = images[i].pixels.transpose();
    }
    return m;
}

void save_images(const fs::path& dir, const Generator& gen, const Eigen::MatrixXd& latents,
                 const std::vector<Image>& images, int cols, int scale, std::uint64_t seed,
                 const Eigen::MatrixXd* alphas = nullptr) {
    TensorArchive a;
    a.kind = "images";
    a.architecture = gen.architecture();
    a.architecture_spec = gen.architecture_spec();
    a.seed = seed;
    if (alphas) {
        a.tensors.add("alphas", *alphas);
    }
    a.tensors.add("latents", latents);
    a.tensors.add("images", images_matrix(images));
    save_archive(a, dir / "images.archive");
    write_png(montage(images, cols, scale), dir / "montage.png");
}

// train-mapper ---------------------------------------------------------------

struct TrainMapperArgs {
    Common common;
};

int cmd_train_mapper(const TrainMapperArgs& args, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load_run_config(args.common, err);
    const Backend backend = make_backend(args.common.backend, cfg);
    const fs::path dir = prepare_out(args.common.out);
    auto manifest = RunManifest::begin("train-mapper", cfg);

    Rng init_rng = Rng(cfg.seed).derive("mapper.init");
    const LatentMapper initial = init_mapper(cfg, *backend.text_encoder, init_rng);
    Rng rng = Rng(cfg.seed).derive("stage1");

    std::error_code ec;
    fs::remove_all(dir / "checkpoints", ec);
    fs::create_directories(dir / "checkpoints");
    Stage1Options opts;
    opts.templates = backend.templates;
    opts.on_checkpoint = [&](int it, const ParameterSet& params) {
        LatentMapper snapshot = initial;
        snapshot.params = params;
        const fs::path rel = fs::path("checkpoints") / fmt::format("mapper_it{:05d}.archive", it);
        save_archive(mapper_archive(snapshot, cfg), dir / rel);
        manifest.checkpoints.push_back(rel.generic_string());
    };
    const auto result = train_mapper(cfg, initial, *backend.source_generator, *backend.image_encoder,
                                     *backend.text_encoder, domain_pair(cfg), rng, opts);

    save_archive(mapper_archive(result.mapper, cfg), dir / "mapper.archive");
    write_stage1_trace(result.trace, dir / "stage1_loss.csv");
    if (!result.trace.empty()) {
        const auto& last = result.trace.back();
        manifest.final_metrics = {{"l_total", last.l_total},
                                  {"l_contr", last.l_contr},
                                  {"l_domain", last.l_domain},
                                  {"mean_diag_sim", last.mean_diag_sim},
                                  {"mean_offdiag_sim", last.mean_offdiag_sim},
                                  {"mean_domain_cos", last.mean_domain_cos}};
        out << fmt::format("stage 1: {} iterations, final loss {:.6g}, diag sim {:.4f}, off-diag sim {:.4f}\n",
                           result.trace.size(), last.l_total, last.mean_diag_sim, last.mean_offdiag_sim);
    }
    manifest.finish();
    save_run_manifest(manifest, dir / "manifest.json");
    out << fmt::format("wrote {}\n", (dir / "mapper.archive").string());
    return kExitOk;
}

// adapt ----------------------------------------------------------------------

struct AdaptArgs {
    Common common;
    std::string mapper;
    std::string scheme;
    std::string freeze;
};

int cmd_adapt(const AdaptArgs& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_run_config(args.common, err);
    if (!args.scheme.empty()) {
        cfg.prompt_scheme = parse_prompt_scheme(args.scheme);
    }
    if (!args.freeze.empty()) {
        cfg.freeze = parse_freeze_kind(args.freeze);
    }
    validate(cfg);
    const PromptSchemeKind kind = cfg.prompt_scheme;
    if (kind == PromptSchemeKind::adaptive && args.mapper.empty()) {
        throw ConfigError("--scheme adaptive requires --mapper DIR (run train-mapper first)");
    }
    const Backend backend = make_backend(args.common.backend, cfg);
    const fs::path dir = prepare_out(args.common.out);
    auto manifest = RunManifest::begin("adapt", cfg);

    PromptScheme scheme;
    std::vector<Stage1Record> stage1_trace;
    if (kind == PromptSchemeKind::adaptive) {
        const LatentMapper F = mapper_from_archive(load_archive(args.mapper));
        if (F.k != backend.text_encoder->dim() || F.latent_dim != backend.source_generator->latent_dim()) {
            throw IncompatibleError(fmt::format(
                "mapper archive has latent_dim {} and k {}, backend has latent_dim {} and k {}", F.latent_dim, F.k,
                backend.source_generator->latent_dim(), backend.text_encoder->dim()));
        }
        scheme = PromptScheme::adaptive(F);
    } else {
        if (!args.mapper.empty()) {
            err << fmt::format("warning: --mapper is ignored for scheme {}\n", to_string(kind));
        }
        scheme = prepare_scheme(cfg, kind, backend, &stage1_trace);
    }
    if (!stage1_trace.empty()) {
        write_stage1_trace(stage1_trace, dir / "stage1_loss.csv");
    }
    if (scheme.fixed && kind == PromptSchemeKind::learned_fixed) {
        TensorArchive a;
        a.kind = "prompts";
        a.architecture = "shared_prompts";
        a.architecture_spec = {{"m", scheme.fixed->rows()}, {"k", scheme.fixed->cols()}};
        a.config = config_to_json(cfg);
        a.seed = cfg.seed;
        a.tensors.add("prompts", *scheme.fixed);
        save_archive(a, dir / "prompts.archive");
    }

    std::error_code ec;
    fs::remove_all(dir / "checkpoints", ec);
    fs::create_directories(dir / "checkpoints");
    auto snapshot = clone_generator(*backend.source_generator);
    Stage2Options opts;
    opts.templates = backend.templates;
    opts.on_checkpoint = [&](int it, const ParameterSet& params) {
        snapshot->set_parameters(params);
        const fs::path rel = fs::path("checkpoints") / fmt::format("generator_it{:05d}.archive", it);
        save_archive(generator_archive(*snapshot, &cfg, cfg.seed), dir / rel);
        manifest.checkpoints.push_back(rel.generic_string());
    };
    Rng rng = Rng(cfg.seed).derive("stage2");
    const auto result = adapt_generator(cfg, *backend.source_generator, scheme, *backend.image_encoder,
                                        *backend.text_encoder, domain_pair(cfg), FreezePolicy::from_config(cfg), rng,
                                        opts);

    save_archive(generator_archive(*result.generator, &cfg, cfg.seed), dir / "generator.archive");
    write_stage2_trace(result.trace, dir / "stage2_loss.csv");

    const auto d = evaluate_scheme(cfg, scheme, *result.generator, backend, 32);
    double head = 0.0, tail = 0.0, max_std = 0.0;
    const std::size_t n = result.trace.size();
    const std::size_t w = std::min<std::size_t>(10, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < w) {
            head += result.trace[i].l_adapt / static_cast<double>(w);
        }
        if (i >= n - w) {
            tail += result.trace[i].l_adapt / static_cast<double>(w);
        }
        max_std = std::max(max_std, result.trace[i].delta_t_std);
    }
    manifest.final_metrics = {{"scheme", std::string(to_string(kind))},
                              {"l_adapt_first10_mean", head},
                              {"l_adapt_last10_mean", tail},
                              {"max_delta_t_std", max_std},
                              {"diversity", d.diversity},
                              {"delta_t_std_eval", d.delta_t_std},
                              {"domain_cos", d.domain_cos}};
    manifest.finish();
    save_run_manifest(manifest, dir / "manifest.json");
    out << fmt::format("stage 2 ({}): L_adapt {:.4f} -> {:.4f}, max delta_t_std {:.3g}, diversity {:.4f}\n",
                       to_string(kind), head, tail, max_std, d.diversity);
    out << fmt::format("wrote {}\n", (dir / "generator.archive").string());
    return kExitOk;
}

// synthesize -----------------------------------------------------------------

struct SynthesizeArgs {
    Common common;
    std::string generator;
    int n = 8;
    std::vector<std::string> latents;
    int scale = 16;
};

int cmd_synthesize(const SynthesizeArgs& args, std::ostream& out) {
    if (args.n < 1 || args.scale < 1) {
        throw ConfigError("--n and --scale must be >= 1");
    }
    const auto gen = generator_from_archive(load_archive(args.generator));
    const fs::path dir = prepare_out(args.common.out);
    Eigen::MatrixXd latents;
    if (!args.latents.empty()) {
        std::vector<std::vector<double>> rows;
        for (const auto& s : args.latents) {
            rows.push_back(parse_number_list(s));
        }
        latents = stack_rows(rows, gen->latent_dim());
    } else {
        Rng rng = Rng(args.common.seed).derive("synthesize");
        latents = gen->sample_latents(args.n, rng).matrix();
    }
    // One latent at a time, the same path interpolate uses for its endpoints.
    std::vector<Image> images;
    for (Eigen::Index i = 0; i < latents.rows(); ++i) {
        images.push_back(gen->synthesize(LatentCode(latents.row(i).transpose())));
    }
    const auto [lo, hi] = value_range(images);
    for (std::size_t i = 0; i < images.size(); ++i) {
        write_png(render_image(images[i], args.scale, lo, hi), dir / fmt::format("sample_{:03d}.png", i));
    }
    save_images(dir, *gen, latents, images, std::min<int>(8, static_cast<int>(images.size())), args.scale,
                args.common.seed);
    out << fmt::format("wrote {} images to {}\n", images.size(), dir.string());
    return kExitOk;
}

// interpolate ----------------------------------------------------------------

struct InterpolateArgs {
    Common common;
    std::string generator;
    std::string generator2;
    std::string mode = "latent";
    std::string w1;
    std::string w2;
    int steps = 5;
    int n = 4;
    int scale = 16;
};

int cmd_interpolate(const InterpolateArgs& args, std::ostream& out) {
    if (args.steps < 2) {
        throw ConfigError(fmt::format("--steps must be >= 2, got {}", args.steps));
    }
    if (args.mode != "latent" && args.mode != "model") {
        throw ConfigError(fmt::format("--mode must be latent or model, got '{}'", args.mode));
    }
    std::vector<double> alphas;
    for (int j = 0; j < args.steps; ++j) {
        alphas.push_back(static_cast<double>(j) / static_cast<double>(args.steps - 1));
    }
    Eigen::MatrixXd alpha_row(1, args.steps);
    for (int j = 0; j < args.steps; ++j) {
        alpha_row(0, j) = alphas[static_cast<std::size_t>(j)];
    }
    const auto gen = generator_from_archive(load_archive(args.generator));

    if (args.mode == "latent") {
        if (args.w1.empty() || args.w2.empty()) {
            throw ConfigError("--mode latent needs --w1 and --w2");
        }
        const Eigen::MatrixXd latents =
            stack_rows({parse_number_list(args.w1), parse_number_list(args.w2)}, gen->latent_dim());
        const fs::path dir = prepare_out(args.common.out);
        const auto images = latent_interpolate(*gen, LatentCode(latents.row(0).transpose()),
                                               LatentCode(latents.row(1).transpose()), alphas);
        save_images(dir, *gen, latents, images, args.steps, args.scale, args.common.seed, &alpha_row);
        out << fmt::format("wrote {} interpolated images to {}\n", images.size(), dir.string());
        return kExitOk;
    }

    if (args.generator2.empty()) {
        throw ConfigError("--mode model needs --generator2");
    }
    const auto gen2 = generator_from_archive(load_archive(args.generator2));
    std::vector<std::string> problems = gen->parameters().mismatches(gen2->parameters());
    if (gen->architecture_spec() != gen2->architecture_spec()) {
        problems.insert(problems.begin(), fmt::format("architecture {} vs {}", gen->architecture_spec().dump(),
                                                      gen2->architecture_spec().dump()));
    }
    if (!problems.empty()) {
        throw IncompatibleError(fmt::format("generators are not interpolable: {}", fmt::join(problems, "; ")));
    }
    Eigen::MatrixXd latents;
    if (!args.w1.empty()) {
        std::vector<std::vector<double>> rows{parse_number_list(args.w1)};
        if (!args.w2.empty()) {
            rows.push_back(parse_number_list(args.w2));
        }
        latents = stack_rows(rows, gen->latent_dim());
    } else {
        if (args.n < 1) {
            throw ConfigError("--n must be >= 1");
        }
        Rng rng = Rng(args.common.seed).derive("interpolate");
        latents = gen->sample_latents(args.n, rng).matrix();
    }
    const fs::path dir = prepare_out(args.common.out);
    std::vector<std::unique_ptr<Generator>> blended;
    for (double a : alphas) {
        auto g = clone_generator(*gen);
        g->set_parameters(model_interpolate(gen->parameters(), gen2->parameters(), a));
        blended.push_back(std::move(g));
    }
    std::vector<Image> images;
    for (Eigen::Index r = 0; r < latents.rows(); ++r) {
        const LatentCode w(latents.row(r).transpose());
        for (const auto& g : blended) {
            images.push_back(g->synthesize(w));
        }
    }
    save_images(dir, *gen, latents, images, args.steps, args.scale, args.common.seed, &alpha_row);
    out << fmt::format("wrote {} x {} model-interpolation grid to {}\n", latents.rows(), args.steps, dir.string());
    return kExitOk;
}

// ablate ---------------------------------------------------------------------

struct AblateArgs {
    Common common;
    std::string schemes = kAllSchemes;
    std::vector<std::string> sweeps;
    bool dump_words = false;
    int eval_samples = 32;
};

void write_sweep_plots(const AblationReport& report, const fs::path& dir) {
    std::map<SweepKind, std::map<PromptSchemeKind, Series>> curves;
    for (const auto& c : report.cells) {
        if (c.sweep == SweepKind::none) {
            continue;
        }
        auto& s = curves[c.sweep][c.scheme];
        s.x.push_back(c.sweep_value);
        s.y.push_back(c.ok ? c.diagnostics.diversity : std::numeric_limits<double>::quiet_NaN());
    }
    for (const auto& [kind, by_scheme] : curves) {
        std::vector<Series> series;
        for (const auto& [scheme, s] : by_scheme) {
            series.push_back(s);
        }
        write_png(line_chart(series, 480, 320), dir / fmt::format("diversity_vs_{}.png", to_string(kind)));
    }
    std::vector<double> variances;
    for (const auto& c : report.cells) {
        variances.push_back(c.ok ? c.diagnostics.delta_t_std * c.diagnostics.delta_t_std
                                 : std::numeric_limits<double>::quiet_NaN());
    }
    if (!variances.empty()) {
        write_png(bar_chart(variances, std::max(320, 12 * static_cast<int>(variances.size()) + 24), 240),
                  dir / "delta_t_variance.png");
    }
    const AblationCell* pick = nullptr;
    for (const auto& c : report.cells) {
        if (c.ok && c.similarity.size() > 0 && (!pick || (c.scheme == PromptSchemeKind::adaptive &&
                                                          pick->scheme != PromptSchemeKind::adaptive))) {
            pick = &c;
        }
    }
    if (pick) {
        write_png(heatmap(pick->similarity, 24), dir / "similarity.png");
        CsvWriter w(dir / "similarity.csv", {"scheme", "sweep", "value", "row", "col", "similarity"});
        for (Eigen::Index r = 0; r < pick->similarity.rows(); ++r) {
            for (Eigen::Index c = 0; c < pick->similarity.cols(); ++c) {
                w.row({std::string(to_string(pick->scheme)), std::string(to_string(pick->sweep)),
                       pick->sweep == SweepKind::none ? "" : csv_number(pick->sweep_value), std::to_string(r),
                       std::to_string(c), csv_number(pick->similarity(r, c))});
            }
        }
    }
}

int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load_run_config(args.common, err);
    const auto schemes = parse_schemes(args.schemes);
    std::vector<Sweep> sweeps;
    for (const auto& s : args.sweeps) {
        sweeps.push_back(Sweep::parse(s));
    }
    if (args.eval_samples < 2) {
        throw ConfigError("--eval-samples must be >= 2");
    }
    const Backend backend = make_backend(args.common.backend, cfg);
    const fs::path dir = prepare_out(args.common.out);
    auto manifest = RunManifest::begin("ablate", cfg);

    std::size_t total = 0;
    for (const auto& s : sweeps) {
        total += s.values.size() * schemes.size();
    }
    if (sweeps.empty()) {
        total = schemes.size();
    }
    AblationOptions opts;
    opts.pipeline.eval_samples = args.eval_samples;
    std::size_t done = 0;
    opts.on_cell = [&](const AblationCell& c) {
        ++done;
        const std::string where =
            c.sweep == SweepKind::none ? "" : fmt::format(" {}={}", to_string(c.sweep), c.sweep_value);
        out << fmt::format("[{}/{}] {}{}: {} ({:.2f} s)\n", done, total, to_string(c.scheme), where,
                           c.ok ? "ok" : "FAILED", c.seconds);
        if (!c.ok) {
            err << fmt::format("warning: {}{} failed: {}\n", to_string(c.scheme), where, c.error);
        }
    };
    const auto report = run_ablation(cfg, schemes, sweeps, backend, opts);

    write_ablation_report(report, dir / "report.csv");
    {
        CsvWriter timing(dir / "timing.csv", {"scheme", "sweep", "value", "seconds"});
        for (const auto& c : report.cells) {
            timing.row({std::string(to_string(c.scheme)), std::string(to_string(c.sweep)),
                        c.sweep == SweepKind::none ? "" : csv_number(c.sweep_value), csv_number(c.seconds)});
        }
    }
    write_sweep_plots(report, dir);
    if (args.dump_words) {
        CsvWriter w(dir / "words.csv", {"scheme", "sweep", "value", "item", "vector", "word", "distance"});
        for (const auto& c : report.cells) {
            for (std::size_t i = 0; i < c.eval_prompts.size(); ++i) {
                const auto& block = c.eval_prompts[i];
                for (Eigen::Index v = 0; v < block.rows(); ++v) {
                    const auto nw = nearest_word(*backend.text_encoder, block.row(v).transpose());
                    w.row({std::string(to_string(c.scheme)), std::string(to_string(c.sweep)),
                           c.sweep == SweepKind::none ? "" : csv_number(c.sweep_value), std::to_string(i),
                           std::to_string(v), nw.word, csv_number(nw.distance)});
                }
            }
        }
    }

    std::size_t failed = 0;
    for (const auto& c : report.cells) {
        failed += c.ok ? 0 : 1;
    }
    manifest.final_metrics = {{"cells", report.cells.size()}, {"failed_cells", failed}};
    manifest.finish();
    save_run_manifest(manifest, dir / "manifest.json");
    out << fmt::format("{} cells, {} failed; report at {}\n", report.cells.size(), failed,
                       (dir / "report.csv").string());
    if (failed == report.cells.size()) {
        err << "error: every ablation cell failed\n";
        return kExitRuntime;
    }
    return kExitOk;
}

// evaluate -------------------------------------------------------------------

struct EvaluateArgs {
    Common common;
    std::string schemes = kAllSchemes;
    std::string generator;
    std::string label = "loaded";
    int n = 16;
};

std::vector<MetricRow> metric_rows(const RunConfig& cfg, const Backend& backend, const Generator& adapted,
                                   const std::string& scheme, int n, std::ostream& err) {
    const Generator& source = *backend.source_generator;
    if (!(adapted.output_shape() == source.output_shape()) || adapted.latent_dim() != source.latent_dim()) {
        throw IncompatibleError("adapted generator does not match the backend's source generator geometry");
    }
    Rng rng = Rng(cfg.seed).derive("metrics");
    const auto latents = source.sample_latents(n, rng);
    const Eigen::MatrixXd xs = source.synthesize(latents);
    const Eigen::MatrixXd xt = adapted.synthesize(latents);
    const ImageShape shape = source.output_shape();

    const ToyClassifier classifier(cfg.backend_seed, shape, kToyClasses);
    const ToySpatialFeatures spatial(cfg.backend_seed, kToySpatialDim);
    const ToyIdentityFeatures identity(cfg.backend_seed, shape, kToyIdentityDim);

    std::vector<Image> targets;
    double sifid_sum = 0.0, id_sum = 0.0, scs_sum = 0.0;
    bool warned = false;
    SifidOptions so;
    so.on_warning = [&](const std::string& msg) {
        if (!warned) {
            err << "warning: " << msg << '\n';
            warned = true;
        }
    };
    for (int i = 0; i < n; ++i) {
        const Image a = image_row(xs, i, shape);
        const Image b = image_row(xt, i, shape);
        targets.push_back(b);
        sifid_sum += sifid(spatial.features(a), spatial.features(b), so);
        id_sum += identity_similarity(identity.features(a), identity.features(b));
        scs_sum += structural_consistency(a, b);
    }
    const double inv = 1.0 / static_cast<double>(n);
    const std::string pair = domain_pair_key(cfg);
    auto row = [&](std::string metric, double v) { return MetricRow{std::move(metric), pair, scheme, v, n, cfg.seed}; };
    return {
        row("inception_score", inception_score(classifier.class_probs(targets))),
        row("sifid", sifid_sum * inv),
        row("identity_similarity", id_sum * inv),
        row("structural_consistency", scs_sum * inv),
        row("diversity", mean_pairwise_cosine_distance(encode_images(*backend.image_encoder, xt))),
    };
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    if (args.n < 2) {
        throw ConfigError("--n must be >= 2");
    }
    const RunConfig cfg = load_run_config(args.common, err);
    const Backend backend = make_backend(args.common.backend, cfg);
    std::vector<MetricRow> rows;
    std::size_t attempted = 0, failed = 0;
    auto emit = [&](const std::vector<MetricRow>& rs) {
        for (const auto& r : rs) {
            out << fmt::format("{:<14} {:<24} {:.6g}\n", r.scheme, r.metric, r.value);
            rows.push_back(r);
        }
    };
    if (!args.generator.empty()) {
        const auto gen = generator_from_archive(load_archive(args.generator));
        const fs::path dir = prepare_out(args.common.out);
        emit(metric_rows(cfg, backend, *gen, args.label, args.n, err));
        write_metric_report(rows, dir / "metrics.csv");
        return kExitOk;
    }
    const auto schemes = parse_schemes(args.schemes);
    const fs::path dir = prepare_out(args.common.out);
    auto manifest = RunManifest::begin("evaluate", cfg);
    for (auto kind : schemes) {
        ++attempted;
        try {
            const auto r = run_pipeline(cfg, kind, backend);
            emit(metric_rows(cfg, backend, *r.stage2.generator, std::string(to_string(kind)), args.n, err));
        } catch (const Error& e) {
            ++failed;
            err << fmt::format("warning: scheme {} failed: {}\n", to_string(kind), e.what());
        }
    }
    write_metric_report(rows, dir / "metrics.csv");
    manifest.final_metrics = {{"schemes", attempted}, {"failed", failed}};
    manifest.finish();
    save_run_manifest(manifest, dir / "manifest.json");
    return failed == attempted ? kExitRuntime : kExitOk;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

fs::path resolve_output(const fs::path& p) {
    if (p.is_relative()) {
        if (const char* root = std::getenv("IPL_DATA_DIR"); root && *root) {
            return fs::path(root) / p;
        }
    }
    return p;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::string body = text;
    if (!text.empty() && fs::is_regular_file(text)) {
        std::ifstream in(text);
        std::stringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    std::vector<double> out;
    std::size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && (body[i] == ',' || std::isspace(static_cast<unsigned char>(body[i])))) {
            ++i;
        }
        if (i >= body.size()) {
            break;
        }
        std::size_t j = i;
        while (j < body.size() && body[j] != ',' && !std::isspace(static_cast<unsigned char>(body[j]))) {
            ++j;
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(body.data() + i, body.data() + j, v);
        if (ec != std::errc() || ptr != body.data() + j) {
            throw ConfigError(fmt::format("'{}' is not a number", body.substr(i, j - i)));
        }
        out.push_back(v);
        i = j;
    }
    if (out.empty()) {
        throw ConfigError(fmt::format("no numbers in '{}'", text));
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Text-driven generator adaptation with per-latent prompts"};
    app.name("ipl");
    app.require_subcommand(1);

    TrainMapperArgs tm;
    auto* tm_cmd = app.add_subcommand("train-mapper", "Stage 1: train the latent mapper");
    add_common(tm_cmd, tm.common);

    AdaptArgs ad;
    auto* ad_cmd = app.add_subcommand("adapt", "Stage 2: adapt the source generator");
    add_common(ad_cmd, ad.common);
    ad_cmd->add_option("--mapper", ad.mapper, "Mapper archive from train-mapper");
    ad_cmd->add_option("--scheme", ad.scheme, "manual_fixed | learned_fixed | random | adaptive");
    ad_cmd->add_option("--freeze", ad.freeze, "train_all | fixed_subset | nada_adaptive");

    SynthesizeArgs sy;
    auto* sy_cmd = app.add_subcommand("synthesize", "Render images from a generator archive");
    add_common(sy_cmd, sy.common, false);
    sy_cmd->add_option("--generator", sy.generator, "Generator archive")->required();
    sy_cmd->add_option("--n", sy.n, "Number of sampled latents")->capture_default_str();
    sy_cmd->add_option("--w", sy.latents, "Explicit latent (comma list or file); repeatable");
    sy_cmd->add_option("--scale", sy.scale, "Pixels per image pixel in PNGs")->capture_default_str();

    InterpolateArgs ip;
    auto* ip_cmd = app.add_subcommand("interpolate", "Latent or weight-space interpolation");
    add_common(ip_cmd, ip.common, false);
    ip_cmd->add_option("--generator", ip.generator, "Generator archive")->required();
    ip_cmd->add_option("--generator2", ip.generator2, "Second generator (model mode)");
    ip_cmd->add_option("--mode", ip.mode, "latent | model")->capture_default_str();
    ip_cmd->add_option("--w1", ip.w1, "First latent (comma list or file)");
    ip_cmd->add_option("--w2", ip.w2, "Second latent (comma list or file)");
    ip_cmd->add_option("--steps", ip.steps, "Grid size K, alphas j/(K-1)")->capture_default_str();
    ip_cmd->add_option("--n", ip.n, "Sampled latents in model mode without --w1")->capture_default_str();
    ip_cmd->add_option("--scale", ip.scale, "Pixels per image pixel in PNGs")->capture_default_str();

    AblateArgs ab;
    auto* ab_cmd = app.add_subcommand("ablate", "Scheme x sweep ablation grid");
    add_common(ab_cmd, ab.common);
    ab_cmd->add_option("--schemes", ab.schemes, "Comma-separated prompt schemes")->capture_default_str();
    ab_cmd->add_option("--sweep", ab.sweeps, "lambda:v1,v2,... or m:v1,v2,...; repeatable");
    ab_cmd->add_flag("--dump-words", ab.dump_words, "Write nearest vocabulary words of prompt vectors");
    ab_cmd->add_option("--eval-samples", ab.eval_samples, "Latents used for diagnostics")->capture_default_str();

    EvaluateArgs ev;
    auto* ev_cmd = app.add_subcommand("evaluate", "IS / SIFID / ID / SCS report");
    add_common(ev_cmd, ev.common);
    ev_cmd->add_option("--schemes", ev.schemes, "Schemes to train and evaluate")->capture_default_str();
    ev_cmd->add_option("--generator", ev.generator, "Evaluate this generator archive instead");
    ev_cmd->add_option("--label", ev.label, "Scheme column for --generator")->capture_default_str();
    ev_cmd->add_option("--n", ev.n, "Samples per metric")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    return guarded(err, [&] {
        if (*tm_cmd) {
            return cmd_train_mapper(tm, out, err);
        }
        if (*ad_cmd) {
            return cmd_adapt(ad, out, err);
        }
        if (*sy_cmd) {
            return cmd_synthesize(sy, out);
        }
        if (*ip_cmd) {
            return cmd_interpolate(ip, out);
        }
        if (*ab_cmd) {
            return cmd_ablate(ab, out, err);
        }
        return cmd_evaluate(ev, out, err);
    });
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace ipl
