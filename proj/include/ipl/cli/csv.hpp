// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ipl/training/pipeline.hpp"
#include "ipl/training/stage1.hpp"
#include "ipl/training/stage2.hpp"

namespace ipl {

// RFC 4180 quoting: fields with a comma, quote or newline are quoted.
std::string csv_escape(std::string_view field);
// Shortest representation that reads back to the same double.
std::string csv_number(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    // Throws PreconditionError if the field count differs from the header.
    void row(const std::vector<std::string>& fields);

private:
    std::filesystem::path path_;
    std::size_t columns_;
    std::ofstream out_;
};

// Split one CSV line; handles quoted fields.
std::vector<std::string> csv_split(std::string_view line);

void write_stage1_trace(const std::vector<Stage1Record>& trace, const std::filesystem::path& path);
void write_stage2_trace(const std::vector<Stage2Record>& trace, const std::filesystem::path& path);

extern const std::vector<std::string> kAblationColumns;
void write_ablation_report(const AblationReport& report, const std::filesystem::path& path);

struct MetricRow {
    std::string metric;
    std::string domain_pair;
    std::string scheme;
    double value = 0.0;
    int n_samples = 0;
    std::uint64_t seed = 0;
};

extern const std::vector<std::string> kMetricColumns;
void write_metric_report(const std::vector<MetricRow>& rows, const std::filesystem::path& path);

}  // namespace ipl
