// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "fedxlat/matrix.hpp"
#include "fedxlat/rng.hpp"

#include "doctest.h"

using fedxlat::WeightMatrix;

namespace {

WeightMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    WeightMatrix m(rows, cols);
    for (double& v : m.data) v = fedxlat::gaussian(rng);
    return m;
}

// Straight triple loop, no zero skipping: the reference for matmul.
WeightMatrix naive_matmul(const WeightMatrix& a, const WeightMatrix& b) {
    WeightMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) {
                sum += a.at(i, k) * b.at(k, j);
            }
            out.at(i, j) = sum;
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("matrix") {

TEST_CASE("construction and row-major indexing") {
    WeightMatrix m(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(m.rows == 2);
    CHECK(m.cols == 3);
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(0, 2) == 3.0);
    CHECK(m.at(1, 0) == 4.0);
    CHECK(m.at(1, 2) == 6.0);

    WeightMatrix zero(3, 2);
    for (double v : zero.data) CHECK(v == 0.0);

    CHECK_THROWS_AS(WeightMatrix(2, 2, {1, 2, 3}), fedxlat::DimensionError);
}

TEST_CASE("matmul matches a hand-computed product") {
    WeightMatrix a(2, 3, {1, 2, 3, 4, 5, 6});
    WeightMatrix b(3, 2, {7, 8, 9, 10, 11, 12});
    WeightMatrix c = fedxlat::matmul(a, b);
    CHECK(c.rows == 2);
    CHECK(c.cols == 2);
    CHECK(c.at(0, 0) == 58.0);
    CHECK(c.at(0, 1) == 64.0);
    CHECK(c.at(1, 0) == 139.0);
    CHECK(c.at(1, 1) == 154.0);
}

TEST_CASE("matmul equals the naive triple loop bit for bit") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 1 + static_cast<std::size_t>(fedxlat::uniform_below(rng, 8));
        const std::size_t k = 1 + static_cast<std::size_t>(fedxlat::uniform_below(rng, 8));
        const std::size_t n = 1 + static_cast<std::size_t>(fedxlat::uniform_below(rng, 8));
        WeightMatrix a = random_matrix(m, k, rng);
        WeightMatrix b = random_matrix(k, n, rng);
        // Sprinkle zeros to cover the skip path.
        for (double& v : a.data) {
            if (fedxlat::uniform01(rng) < 0.3) v = 0.0;
        }
        CHECK(fedxlat::matmul(a, b) == naive_matmul(a, b));
    }
}

TEST_CASE("matmul by identity is the identity map") {
    std::mt19937_64 rng(5);
    WeightMatrix a = random_matrix(4, 4, rng);
    WeightMatrix eye(4, 4);
    for (std::size_t i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
    CHECK(fedxlat::matmul(a, eye) == a);
    CHECK(fedxlat::matmul(eye, a) == a);
}

TEST_CASE("matmul rejects inner dimension mismatch") {
    WeightMatrix a(2, 3);
    WeightMatrix b(2, 2);
    CHECK_THROWS_AS(fedxlat::matmul(a, b), fedxlat::DimensionError);
}

TEST_CASE("add and scale are elementwise") {
    WeightMatrix a(2, 2, {1, 2, 3, 4});
    WeightMatrix b(2, 2, {10, 20, 30, 40});
    WeightMatrix sum = fedxlat::add(a, b);
    CHECK(sum == WeightMatrix(2, 2, {11, 22, 33, 44}));
    CHECK(fedxlat::scale(a, 2.0) == WeightMatrix(2, 2, {2, 4, 6, 8}));
    CHECK_THROWS_AS(fedxlat::add(a, WeightMatrix(2, 3)), fedxlat::DimensionError);
}

TEST_CASE("max_abs_diff finds the largest gap") {
    WeightMatrix a(2, 2, {1, 2, 3, 4});
    WeightMatrix b(2, 2, {1, 2.5, 3, 3});
    CHECK(fedxlat::max_abs_diff(a, b) == 1.0);
    CHECK(fedxlat::max_abs_diff(a, a) == 0.0);
    CHECK_THROWS_AS(fedxlat::max_abs_diff(a, WeightMatrix(1, 4)), fedxlat::DimensionError);
}

TEST_CASE("frobenius norm on a 3-4-5 triangle") {
    WeightMatrix m(1, 2, {3, 4});
    CHECK(m.frobenius_norm() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(WeightMatrix(3, 3).frobenius_norm() == 0.0);
}

TEST_CASE("all_finite flags NaN and infinity") {
    WeightMatrix m(2, 2, {1, 2, 3, 4});
    CHECK(m.all_finite());
    m.at(1, 1) = std::nan("");
    CHECK_FALSE(m.all_finite());
    m.at(1, 1) = INFINITY;
    CHECK_FALSE(m.all_finite());
}

TEST_CASE("equality requires identical shape and contents") {
    WeightMatrix a(2, 2, {1, 2, 3, 4});
    WeightMatrix b = a;
    CHECK(a == b);
    b.at(0, 0) = 1.5;
    CHECK_FALSE(a == b);
    CHECK_FALSE(WeightMatrix(1, 4, {1, 2, 3, 4}) == a);
    CHECK(a.same_shape(b));
    CHECK_FALSE(a.same_shape(WeightMatrix(4, 1)));
}

}  // TEST_SUITE
