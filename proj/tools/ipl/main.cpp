// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/cli/commands.hpp"

int main(int argc, char** argv) {
    return ipl::run_cli(argc, argv);
}
