#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lakevort/grid.hpp"

namespace lakevort {

// 64-bit FNV-1a over a byte range; the two-argument form chains blocks.
std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t state = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(const std::string& s);

// Checksum of a file's raw bytes; throws std::runtime_error when unreadable.
std::uint64_t file_fnv1a64(const std::string& path);

// Fixed-width lowercase hex (16 digits) used in manifests and metadata.
std::string to_hex16(std::uint64_t v);

// Decimal rendering that round-trips doubles exactly (printf "%.17g").
std::string format_g17(double v);

// Joins cells with commas and appends a newline.  Cells must not contain
// commas, quotes, or newlines; violations throw std::invalid_argument.
std::string csv_row(const std::vector<std::string>& cells);

std::string read_text(const std::string& path);

// Writes to "<path>.tmp" and renames over the target so readers never observe
// a partial file.  Throws std::runtime_error on IO failure.
void write_text_atomic(const std::string& path, const std::string& content);

// Binary field container: 32-byte header (magic "LVF1", u16 nx, u16 ny,
// f64 h, f64 origin.x, f64 origin.y, little-endian) followed by nx*ny
// little-endian f64 values in row-major order with i fastest.
void write_field_lvf(const std::string& path, const ScalarField& f);
ScalarField read_field_lvf(const std::string& path);

// Serialized bytes of the LVF container (what write_field_lvf puts on disk).
std::vector<std::uint8_t> field_lvf_bytes(const ScalarField& f);

} // namespace lakevort
