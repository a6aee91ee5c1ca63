// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// The `ipl` command line. Subcommands:
//
//   train-mapper  Stage 1 for the adaptive scheme
//   adapt         Stage 2 under a chosen prompt scheme
//   synthesize    images from a generator archive
//   interpolate   latent or weight-space interpolation grids
//   ablate        scheme x sweep grid with CSV report and plots
//   evaluate      IS / SIFID / ID / SCS report
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure
// (training abort, incompatible archives, every ablation cell failed).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ipl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

// Relative output paths are placed under $IPL_DATA_DIR when it is set.
std::filesystem::path resolve_output(const std::filesystem::path& p);

// Comma- or whitespace-separated numbers, given inline or as a file path.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace ipl
