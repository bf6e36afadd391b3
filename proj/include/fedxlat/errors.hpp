// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fedxlat {

/// Base class for all fedxlat errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix or adapter shape violation.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid argument to an operation (empty input, bad enum, out-of-range token).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A computation produced NaN or Inf.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed FLAD container or JSONL record. The message names the offending
/// tensor or line.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Client adapters that cannot be combined (shape or rank mismatch).
class AggregationError : public Error {
public:
    using Error::Error;
};

/// Statistical test input with no usable signal (e.g. all-zero differences).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A federation round received a submission that failed validation.
class PoisonedRoundError : public Error {
public:
    using Error::Error;
};

}  // namespace fedxlat
