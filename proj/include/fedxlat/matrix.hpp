// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fedxlat/errors.hpp"

namespace fedxlat {

/// Dense m x n matrix of 64-bit reals, row-major.
struct WeightMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols entries, row-major

    WeightMatrix() = default;

    WeightMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    WeightMatrix(std::size_t r, std::size_t c, std::vector<double> values)
        : rows(r), cols(c), data(std::move(values)) {
        if (data.size() != rows * cols) {
            throw DimensionError("WeightMatrix: data length does not match rows*cols");
        }
    }

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool all_finite() const {
        for (double v : data) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    bool same_shape(const WeightMatrix& other) const {
        return rows == other.rows && cols == other.cols;
    }

    bool operator==(const WeightMatrix& other) const {
        return rows == other.rows && cols == other.cols && data == other.data;
    }

    double frobenius_norm() const {
        double sum = 0.0;
        for (double v : data) sum += v * v;
        return std::sqrt(sum);
    }
};

/// a (m x k) times b (k x n). Throws DimensionError on inner mismatch.
WeightMatrix matmul(const WeightMatrix& a, const WeightMatrix& b);

/// Elementwise a + b.
WeightMatrix add(const WeightMatrix& a, const WeightMatrix& b);

/// Elementwise s * a.
WeightMatrix scale(const WeightMatrix& a, double s);

/// Largest absolute elementwise difference; shapes must match.
double max_abs_diff(const WeightMatrix& a, const WeightMatrix& b);

}  // namespace fedxlat
