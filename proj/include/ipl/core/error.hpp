// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ipl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or dimension disagreement between two tensors.
struct DimensionError : Error {
    using Error::Error;
};

// A vector whose norm is at or below the degeneracy threshold.
struct DegenerateVectorError : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

// Two parameter sets (or models) that cannot be combined.
struct IncompatibleError : Error {
    using Error::Error;
};

// Raised by the trainers when a run cannot continue.
struct TrainingAbort : Error {
    using Error::Error;
};

}  // namespace ipl
