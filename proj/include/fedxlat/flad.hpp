// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fedxlat/adapters.hpp"

namespace fedxlat {

// FLAD adapter container, bit-exact:
//   magic "FLAD" (4 bytes)
//   format version, u32 little-endian (currently 1)
//   header length, u64 little-endian
//   UTF-8 JSON header: { "<slot>.A": {dtype, shape, offset},
//                        "<slot>.B": {...}, ..., "rank": r, "alpha": a }
//   payload: concatenated row-major little-endian f64 tensors
// Tensors are laid out in slot-name order, A before B. The file checksum is
// the SHA-256 of all bytes.

inline constexpr std::uint32_t kFladVersion = 1;

/// Serialize a set to FLAD bytes. Output is deterministic: one set, one
/// byte sequence.
std::string encode_adapter_set(const AdapterSet& set);

/// Parse FLAD bytes. Throws FormatError naming the offending tensor on bad
/// magic, truncation, or shape/length mismatch. Decoding is structural only:
/// non-finite payload values round-trip so submission validation can name
/// them, and check_adapter_set is the caller's gate for semantic soundness.
AdapterSet decode_adapter_set(std::string_view bytes);

/// Write the FLAD container for `set` and return its SHA-256 (lowercase hex).
std::string write_adapter_file(const AdapterSet& set, const std::filesystem::path& path);

/// Read a FLAD container written by write_adapter_file.
AdapterSet read_adapter_file(const std::filesystem::path& path);

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(std::string_view bytes);

}  // namespace fedxlat
