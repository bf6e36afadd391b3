// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/flad.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace fedxlat {

namespace {

void append_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void append_f64_le(std::string& out, double d) {
    append_u64_le(out, std::bit_cast<std::uint64_t>(d));
}

std::uint32_t read_u32_le(std::string_view bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | static_cast<unsigned char>(bytes[offset + i]);
    }
    return v;
}

std::uint64_t read_u64_le(std::string_view bytes, std::size_t offset) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | static_cast<unsigned char>(bytes[offset + i]);
    }
    return v;
}

double read_f64_le(std::string_view bytes, std::size_t offset) {
    return std::bit_cast<double>(read_u64_le(bytes, offset));
}

WeightMatrix read_tensor(std::string_view payload, const std::string& tensor_name,
                         std::uint64_t offset, std::size_t rows, std::size_t cols) {
    if (rows < 1 || cols < 1) {
        throw FormatError("FLAD: tensor '" + tensor_name + "' declares an empty shape");
    }
    const std::uint64_t byte_count = static_cast<std::uint64_t>(rows) * cols * sizeof(double);
    if (offset > payload.size() || byte_count > payload.size() - offset) {
        throw FormatError("FLAD: tensor '" + tensor_name + "' extends past the payload");
    }
    WeightMatrix m(rows, cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        m.data[i] = read_f64_le(payload, offset + i * sizeof(double));
    }
    return m;
}

}  // namespace

std::string encode_adapter_set(const AdapterSet& set) {
    check_adapter_set(set);

    nlohmann::json header = nlohmann::json::object();
    std::string payload;
    std::uint64_t offset = 0;
    for (const auto& [slot, adapter] : set.entries) {
        for (const auto* factor : {&adapter.a_factor, &adapter.b_factor}) {
            const std::string tensor_name = slot + (factor == &adapter.a_factor ? ".A" : ".B");
            header[tensor_name] = {{"dtype", "f64"},
                                   {"shape", {factor->rows, factor->cols}},
                                   {"offset", offset}};
            for (double v : factor->data) {
                append_f64_le(payload, v);
            }
            offset += factor->data.size() * sizeof(double);
        }
    }
    if (!set.entries.empty()) {
        header["rank"] = set_rank(set);
        header["alpha"] = set.entries.begin()->second.alpha;
    } else {
        header["rank"] = 0;
        header["alpha"] = 0.0;
    }

    const std::string header_text = header.dump();
    std::string out;
    out.reserve(16 + header_text.size() + payload.size());
    out += "FLAD";
    append_u32_le(out, kFladVersion);
    append_u64_le(out, header_text.size());
    out += header_text;
    out += payload;
    return out;
}

namespace {
AdapterSet decode_adapter_set_impl(std::string_view bytes);
}

AdapterSet decode_adapter_set(std::string_view bytes) {
    try {
        return decode_adapter_set_impl(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("FLAD: malformed header: ") + e.what());
    }
}

namespace {
AdapterSet decode_adapter_set_impl(std::string_view bytes) {
    if (bytes.size() < 16) {
        throw FormatError("FLAD: file shorter than the fixed header");
    }
    if (bytes.substr(0, 4) != "FLAD") {
        throw FormatError("FLAD: bad magic bytes");
    }
    const std::uint32_t version = read_u32_le(bytes, 4);
    if (version != kFladVersion) {
        throw FormatError("FLAD: unsupported format version " + std::to_string(version));
    }
    const std::uint64_t header_len = read_u64_le(bytes, 8);
    if (header_len > bytes.size() - 16) {
        throw FormatError("FLAD: header length exceeds file size");
    }
    const std::string_view header_text = bytes.substr(16, header_len);
    const std::string_view payload = bytes.substr(16 + header_len);

    nlohmann::json header = nlohmann::json::parse(header_text, nullptr, false);
    if (header.is_discarded() || !header.is_object()) {
        throw FormatError("FLAD: header is not valid JSON");
    }
    if (!header.contains("rank") || !header["rank"].is_number_unsigned()) {
        throw FormatError("FLAD: header is missing 'rank'");
    }
    if (!header.contains("alpha") || !header["alpha"].is_number()) {
        throw FormatError("FLAD: header is missing 'alpha'");
    }
    const std::size_t rank = header["rank"].get<std::size_t>();
    const double alpha = header["alpha"].get<double>();

    struct TensorRef {
        std::uint64_t offset = 0;
        std::size_t rows = 0, cols = 0;
        bool present = false;
    };
    std::map<std::string, std::pair<TensorRef, TensorRef>> slots;  // slot -> (A, B)
    std::uint64_t declared_bytes = 0;

    for (const auto& [key, value] : header.items()) {
        if (key == "rank" || key == "alpha") continue;
        if (key.size() < 3 || (key.substr(key.size() - 2) != ".A" && key.substr(key.size() - 2) != ".B")) {
            throw FormatError("FLAD: tensor '" + key + "' is not named '<slot>.A' or '<slot>.B'");
        }
        if (!value.is_object() || value.value("dtype", "") != "f64" || !value.contains("shape") ||
            !value["shape"].is_array() || value["shape"].size() != 2 || !value.contains("offset")) {
            throw FormatError("FLAD: tensor '" + key + "' has a malformed descriptor");
        }
        TensorRef ref;
        ref.rows = value["shape"][0].get<std::size_t>();
        ref.cols = value["shape"][1].get<std::size_t>();
        ref.offset = value["offset"].get<std::uint64_t>();
        ref.present = true;
        declared_bytes += static_cast<std::uint64_t>(ref.rows) * ref.cols * sizeof(double);

        const std::string slot = key.substr(0, key.size() - 2);
        auto& pair = slots[slot];
        if (key.back() == 'A') {
            pair.first = ref;
        } else {
            pair.second = ref;
        }
    }
    if (declared_bytes != payload.size()) {
        throw FormatError("FLAD: payload size does not match the declared tensors");
    }

    AdapterSet set;
    for (const auto& [slot, refs] : slots) {
        if (!refs.first.present) {
            throw FormatError("FLAD: tensor '" + slot + ".A' is missing");
        }
        if (!refs.second.present) {
            throw FormatError("FLAD: tensor '" + slot + ".B' is missing");
        }
        LoraAdapter adapter;
        adapter.name = slot;
        adapter.rank = rank;
        adapter.alpha = alpha;
        adapter.a_factor = read_tensor(payload, slot + ".A", refs.first.offset, refs.first.rows,
                                       refs.first.cols);
        adapter.b_factor = read_tensor(payload, slot + ".B", refs.second.offset, refs.second.rows,
                                       refs.second.cols);
        if (adapter.a_factor.cols != rank) {
            throw FormatError("FLAD: tensor '" + slot + ".A' disagrees with the declared rank");
        }
        if (adapter.b_factor.rows != rank) {
            throw FormatError("FLAD: tensor '" + slot + ".B' disagrees with the declared rank");
        }
        set.entries.emplace(slot, std::move(adapter));
    }
    if (!set.entries.empty() && !(alpha > 0.0)) {
        throw FormatError("FLAD: alpha must be positive");
    }
    return set;
}
}  // namespace

std::string write_adapter_file(const AdapterSet& set, const std::filesystem::path& path) {
    const std::string bytes = encode_adapter_set(set);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ArgumentError("cannot open '" + path.string() + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
        throw ArgumentError("short write to '" + path.string() + "'");
    }
    return sha256_hex(bytes);
}

AdapterSet read_adapter_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ArgumentError("cannot open '" + path.string() + "' for reading");
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_adapter_set(bytes);
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &digest_len, EVP_sha256(), nullptr) != 1) {
        throw NumericError("SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(digest_len * 2);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace fedxlat
