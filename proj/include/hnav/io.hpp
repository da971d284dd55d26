#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hnav {

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// FNV-1a 64-bit, rendered as 16 hex chars; used to stamp derived files
/// with the digest of their source data.
std::string fnv1a_hex(std::string_view bytes);

/// Fixed-precision decimal formatting (deterministic across runs).
std::string format_double(double v, int decimals);

/// Split into lines, dropping a trailing empty line.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace hnav
