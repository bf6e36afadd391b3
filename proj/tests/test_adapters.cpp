// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "fedxlat/adapters.hpp"

#include "doctest.h"

using fedxlat::AdapterSet;
using fedxlat::LoraAdapter;
using fedxlat::WeightMatrix;

TEST_SUITE("adapters") {

TEST_CASE("new_adapter draws A and zeroes B") {
    const LoraAdapter adapter = fedxlat::new_adapter(32, 24, 4, 16.0, 99, "proj");
    CHECK(adapter.name == "proj");
    CHECK(adapter.rank == 4);
    CHECK(adapter.alpha == 16.0);
    CHECK(adapter.a_factor.rows == 32);
    CHECK(adapter.a_factor.cols == 4);
    CHECK(adapter.b_factor.rows == 4);
    CHECK(adapter.b_factor.cols == 24);

    for (double v : adapter.b_factor.data) CHECK(v == 0.0);

    // Sample moments of A: mean near 0, standard deviation near 1/rank.
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : adapter.a_factor.data) {
        sum += v;
        sum_sq += v * v;
    }
    const double count = static_cast<double>(adapter.a_factor.data.size());
    const double mean = sum / count;
    const double stddev = std::sqrt(sum_sq / count - mean * mean);
    CHECK(std::abs(mean) < 0.05);
    CHECK(stddev == doctest::Approx(1.0 / 4.0).epsilon(0.15));
}

TEST_CASE("new_adapter is seed deterministic") {
    const LoraAdapter a = fedxlat::new_adapter(8, 8, 2, 16.0, 7);
    const LoraAdapter b = fedxlat::new_adapter(8, 8, 2, 16.0, 7);
    const LoraAdapter c = fedxlat::new_adapter(8, 8, 2, 16.0, 8);
    CHECK(a == b);
    CHECK_FALSE(a == c);
}

TEST_CASE("a fresh adapter has an exactly zero delta") {
    const LoraAdapter adapter = fedxlat::new_adapter(16, 16, 4, 16.0, 3);
    const WeightMatrix d = fedxlat::delta(adapter);
    for (double v : d.data) CHECK(v == 0.0);
}

TEST_CASE("new_adapter rejects impossible ranks") {
    CHECK_THROWS_AS(fedxlat::new_adapter(4, 8, 0, 16.0, 1), fedxlat::DimensionError);
    CHECK_THROWS_AS(fedxlat::new_adapter(4, 8, 5, 16.0, 1), fedxlat::DimensionError);
}

TEST_CASE("delta applies the alpha over rank scale") {
    LoraAdapter adapter;
    adapter.name = "w";
    adapter.rank = 1;
    adapter.alpha = 2.0;
    adapter.a_factor = WeightMatrix(2, 1, {1, 2});
    adapter.b_factor = WeightMatrix(1, 2, {3, 4});
    // (alpha/rank) * A * B = 2 * [[3,4],[6,8]]
    CHECK(fedxlat::delta(adapter) == WeightMatrix(2, 2, {6, 8, 12, 16}));
}

TEST_CASE("merge adds the delta onto the base") {
    LoraAdapter adapter;
    adapter.rank = 1;
    adapter.alpha = 1.0;
    adapter.a_factor = WeightMatrix(2, 1, {1, 0});
    adapter.b_factor = WeightMatrix(1, 2, {1, 1});
    WeightMatrix base(2, 2, {10, 10, 10, 10});
    CHECK(fedxlat::merge(base, adapter) == WeightMatrix(2, 2, {11, 11, 10, 10}));
    CHECK(base == WeightMatrix(2, 2, {10, 10, 10, 10}));
}

TEST_CASE("check_adapter rejects invariant violations") {
    LoraAdapter adapter = fedxlat::new_adapter(4, 4, 2, 16.0, 1, "w");
    CHECK_NOTHROW(fedxlat::check_adapter(adapter));

    LoraAdapter wrong_rank = adapter;
    wrong_rank.rank = 3;
    CHECK_THROWS_AS(fedxlat::check_adapter(wrong_rank), fedxlat::DimensionError);

    LoraAdapter nan_entry = adapter;
    nan_entry.a_factor.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(fedxlat::check_adapter(nan_entry), fedxlat::Error);

    LoraAdapter bad_alpha = adapter;
    bad_alpha.alpha = 0.0;
    CHECK_THROWS_AS(fedxlat::check_adapter(bad_alpha), fedxlat::Error);

    LoraAdapter zero_rank = adapter;
    zero_rank.rank = 0;
    zero_rank.a_factor = WeightMatrix(4, 0);
    zero_rank.b_factor = WeightMatrix(0, 4);
    CHECK_THROWS_AS(fedxlat::check_adapter(zero_rank), fedxlat::Error);
}

TEST_CASE("adapter sets expose one shared rank") {
    AdapterSet set;
    set.entries.emplace("q", fedxlat::new_adapter(8, 8, 2, 16.0, 1, "q"));
    set.entries.emplace("v", fedxlat::new_adapter(8, 8, 2, 16.0, 2, "v"));
    CHECK_NOTHROW(fedxlat::check_adapter_set(set));
    CHECK(fedxlat::set_rank(set) == 2);

    AdapterSet mixed = set;
    mixed.entries["v"] = fedxlat::new_adapter(8, 8, 4, 16.0, 2, "v");
    CHECK_THROWS_AS(fedxlat::check_adapter_set(mixed), fedxlat::Error);

    AdapterSet misnamed = set;
    misnamed.entries["q"].name = "k";
    CHECK_THROWS_AS(fedxlat::check_adapter_set(misnamed), fedxlat::Error);
}

}  // TEST_SUITE
