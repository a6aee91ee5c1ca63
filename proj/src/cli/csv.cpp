// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/cli/csv.hpp"

#include <fmt/format.h>

#include "ipl/core/error.hpp"

namespace ipl {

const std::vector<std::string> kAblationColumns = {
    "scheme",      "sweep",        "value",      "status",     "stage1_loss", "stage2_loss",
    "delta_t_std", "max_delta_t_std_trace", "diversity", "domain_cos", "error",
};

const std::vector<std::string> kMetricColumns = {"metric", "domain_pair", "scheme", "value", "n_samples", "seed"};

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_number(double v) {
    return fmt::format("{}", v);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()), out_(path, std::ios::trunc) {
    if (!out_) {
        throw Error(fmt::format("cannot write {}", path.string()));
    }
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
        throw PreconditionError(
            fmt::format("{}: row has {} fields, header has {}", path_.string(), fields.size(), columns_));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << csv_escape(fields[i]);
    }
    out_ << '\n';
    if (!out_) {
        throw Error(fmt::format("write to {} failed", path_.string()));
    }
}

std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    return out;
}

void write_stage1_trace(const std::vector<Stage1Record>& trace, const std::filesystem::path& path) {
    CsvWriter w(path, {"iteration", "l_contr", "l_domain", "l_total", "mean_diag_sim", "mean_offdiag_sim",
                       "mean_domain_cos"});
    for (const auto& r : trace) {
        w.row({std::to_string(r.iteration), csv_number(r.l_contr), csv_number(r.l_domain), csv_number(r.l_total),
               csv_number(r.mean_diag_sim), csv_number(r.mean_offdiag_sim), csv_number(r.mean_domain_cos)});
    }
}

void write_stage2_trace(const std::vector<Stage2Record>& trace, const std::filesystem::path& path) {
    CsvWriter w(path, {"iteration", "l_adapt", "delta_t_std", "skipped_pairs", "l_adapt_ema"});
    for (const auto& r : trace) {
        w.row({std::to_string(r.iteration), csv_number(r.l_adapt), csv_number(r.delta_t_std),
               std::to_string(r.skipped_pairs), csv_number(r.l_adapt_ema)});
    }
}

void write_ablation_report(const AblationReport& report, const std::filesystem::path& path) {
    CsvWriter w(path, kAblationColumns);
    for (const auto& c : report.cells) {
        const bool swept = c.sweep != SweepKind::none;
        w.row({
            std::string(to_string(c.scheme)),
            std::string(to_string(c.sweep)),
            swept ? csv_number(c.sweep_value) : "",
            c.ok ? "ok" : "failed",
            c.ok && c.stage1_loss ? csv_number(*c.stage1_loss) : "",
            c.ok ? csv_number(c.stage2_loss) : "",
            c.ok ? csv_number(c.diagnostics.delta_t_std) : "",
            c.ok ? csv_number(c.max_delta_t_std_trace) : "",
            c.ok ? csv_number(c.diagnostics.diversity) : "",
            c.ok ? csv_number(c.diagnostics.domain_cos) : "",
            c.error,
        });
    }
}

void write_metric_report(const std::vector<MetricRow>& rows, const std::filesystem::path& path) {
    CsvWriter w(path, kMetricColumns);
    for (const auto& r : rows) {
        w.row({r.metric, r.domain_pair, r.scheme, csv_number(r.value), std::to_string(r.n_samples),
               std::to_string(r.seed)});
    }
}

}  // namespace ipl
