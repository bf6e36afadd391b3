// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/matrix.hpp"

#include <algorithm>

namespace fedxlat {

WeightMatrix matmul(const WeightMatrix& a, const WeightMatrix& b) {
    if (a.cols != b.rows) {
        throw DimensionError("matmul: inner dimensions disagree");
    }
    WeightMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            const double* brow = &b.data[k * b.cols];
            double* orow = &out.data[i * out.cols];
            for (std::size_t j = 0; j < b.cols; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    return out;
}

WeightMatrix add(const WeightMatrix& a, const WeightMatrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("add: shape mismatch");
    }
    WeightMatrix out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] += b.data[i];
    }
    return out;
}

WeightMatrix scale(const WeightMatrix& a, double s) {
    WeightMatrix out = a;
    for (double& v : out.data) v *= s;
    return out;
}

double max_abs_diff(const WeightMatrix& a, const WeightMatrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("max_abs_diff: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    }
    return worst;
}

}  // namespace fedxlat
