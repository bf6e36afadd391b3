// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>

#include "fedxlat/flad.hpp"
#include "fedxlat/rng.hpp"

#include "doctest.h"

using fedxlat::AdapterSet;
using fedxlat::LoraAdapter;

namespace {

AdapterSet random_set(std::mt19937_64& rng, std::size_t slots) {
    AdapterSet set;
    const std::size_t rank = 1 + static_cast<std::size_t>(fedxlat::uniform_below(rng, 4));
    for (std::size_t s = 0; s < slots; ++s) {
        const std::string name = "slot" + std::to_string(s);
        const std::size_t m = rank + static_cast<std::size_t>(fedxlat::uniform_below(rng, 12));
        const std::size_t n = rank + static_cast<std::size_t>(fedxlat::uniform_below(rng, 12));
        LoraAdapter adapter = fedxlat::new_adapter(m, n, rank, 16.0, rng(), name);
        for (double& v : adapter.b_factor.data) v = fedxlat::gaussian(rng);
        set.entries.emplace(name, std::move(adapter));
    }
    return set;
}

std::uint32_t read_u32(const std::string& bytes, std::size_t offset) {
    std::uint32_t value = 0;
    std::memcpy(&value, bytes.data() + offset, sizeof value);
    return value;
}

std::uint64_t read_u64(const std::string& bytes, std::size_t offset) {
    std::uint64_t value = 0;
    std::memcpy(&value, bytes.data() + offset, sizeof value);
    return value;
}

}  // namespace

TEST_SUITE("flad") {

TEST_CASE("container layout: magic, version, header length") {
    std::mt19937_64 rng(1);
    const AdapterSet set = random_set(rng, 2);
    const std::string bytes = fedxlat::encode_adapter_set(set);

    REQUIRE(bytes.size() > 16);
    CHECK(bytes.substr(0, 4) == "FLAD");
    CHECK(read_u32(bytes, 4) == fedxlat::kFladVersion);
    const std::uint64_t header_len = read_u64(bytes, 8);
    CHECK(16 + header_len < bytes.size());
    // The header is UTF-8 JSON mentioning each tensor.
    const std::string header = bytes.substr(16, header_len);
    CHECK(header.find("slot0.A") != std::string::npos);
    CHECK(header.find("slot1.B") != std::string::npos);
    CHECK(header.find("f64") != std::string::npos);
}

TEST_CASE("encode is deterministic") {
    std::mt19937_64 rng(2);
    const AdapterSet set = random_set(rng, 3);
    CHECK(fedxlat::encode_adapter_set(set) == fedxlat::encode_adapter_set(set));
}

TEST_CASE("round-trip is bit exact over randomized sets") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t slots = 1 + static_cast<std::size_t>(fedxlat::uniform_below(rng, 3));
        const AdapterSet set = random_set(rng, slots);
        const AdapterSet back = fedxlat::decode_adapter_set(fedxlat::encode_adapter_set(set));
        CHECK(back == set);
    }
}

TEST_CASE("non-default rank and alpha survive the trip") {
    AdapterSet set;
    LoraAdapter adapter = fedxlat::new_adapter(10, 6, 3, 7.5, 42, "w");
    adapter.b_factor.at(2, 5) = -0.125;
    set.entries.emplace("w", adapter);
    const AdapterSet back = fedxlat::decode_adapter_set(fedxlat::encode_adapter_set(set));
    CHECK(back.entries.at("w").rank == 3);
    CHECK(back.entries.at("w").alpha == 7.5);
    CHECK(back.entries.at("w").b_factor.at(2, 5) == -0.125);
}

TEST_CASE("file write and read round-trip with a stable checksum") {
    std::mt19937_64 rng(4);
    const AdapterSet set = random_set(rng, 2);
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "fedxlat_flad_roundtrip.flad";
    const std::string checksum = fedxlat::write_adapter_file(set, path);
    CHECK(checksum.size() == 64);
    CHECK(fedxlat::read_adapter_file(path) == set);
    CHECK(checksum == fedxlat::sha256_hex(fedxlat::encode_adapter_set(set)));
    std::filesystem::remove(path);
}

TEST_CASE("sha256 known answers") {
    CHECK(fedxlat::sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(fedxlat::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("any single bit flip changes the checksum") {
    std::mt19937_64 rng(5);
    const AdapterSet set = random_set(rng, 1);
    const std::string bytes = fedxlat::encode_adapter_set(set);
    const std::string checksum = fedxlat::sha256_hex(bytes);
    for (int trial = 0; trial < 200; ++trial) {
        std::string corrupted = bytes;
        const std::size_t byte_index =
            static_cast<std::size_t>(fedxlat::uniform_below(rng, corrupted.size()));
        const int bit = static_cast<int>(fedxlat::uniform_below(rng, 8));
        corrupted[byte_index] = static_cast<char>(corrupted[byte_index] ^ (1 << bit));
        CHECK(fedxlat::sha256_hex(corrupted) != checksum);
    }
}

TEST_CASE("decode rejects malformed containers") {
    std::mt19937_64 rng(6);
    const AdapterSet set = random_set(rng, 1);
    const std::string bytes = fedxlat::encode_adapter_set(set);

    CHECK_THROWS_AS(fedxlat::decode_adapter_set(""), fedxlat::FormatError);
    CHECK_THROWS_AS(fedxlat::decode_adapter_set("FLA"), fedxlat::FormatError);

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(fedxlat::decode_adapter_set(bad_magic), fedxlat::FormatError);

    std::string bad_version = bytes;
    bad_version[4] = 9;
    CHECK_THROWS_AS(fedxlat::decode_adapter_set(bad_version), fedxlat::FormatError);

    std::string truncated = bytes.substr(0, bytes.size() - 3);
    CHECK_THROWS_AS(fedxlat::decode_adapter_set(truncated), fedxlat::FormatError);

    // Corrupt the JSON header itself.
    std::string bad_header = bytes;
    bad_header[16] = '!';
    CHECK_THROWS_AS(fedxlat::decode_adapter_set(bad_header), fedxlat::FormatError);
}

TEST_CASE("decode is structural: non-finite payloads round-trip for validation") {
    std::mt19937_64 rng(7);
    AdapterSet set = random_set(rng, 1);
    std::string bytes = fedxlat::encode_adapter_set(set);
    // Overwrite the first payload float with a NaN bit pattern. The decoder
    // must hand it back so the submission validator can name the real fault.
    const std::uint64_t header_len = read_u64(bytes, 8);
    const std::size_t payload = 16 + static_cast<std::size_t>(header_len);
    const std::uint64_t nan_bits = 0x7ff8000000000000ULL;
    std::memcpy(bytes.data() + payload, &nan_bits, sizeof nan_bits);
    const AdapterSet poisoned = fedxlat::decode_adapter_set(bytes);
    const fedxlat::LoraAdapter& first = poisoned.entries.begin()->second;
    CHECK(std::isnan(first.a_factor.data[0]));
    CHECK_THROWS_AS(fedxlat::check_adapter_set(poisoned), fedxlat::Error);
}

}  // TEST_SUITE
