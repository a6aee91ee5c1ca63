// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ipl {

// The bundled 79 prompt templates; data/templates.txt holds the same list.
const std::vector<std::string>& default_templates();

// One template per line, "{}" marks the label slot. Blank lines are skipped.
std::vector<std::string> load_templates(const std::filesystem::path& path);

// Replaces the single "{}" slot with `label`.
std::string fill_template(std::string_view tmpl, std::string_view label);

}  // namespace ipl
