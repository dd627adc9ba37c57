#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace respire::text {

// Shortest form that reads back to the same double.
std::string format_real(double value);
// Throws Error(SchemaMismatch) when the whole field is not a number.
double parse_real(std::string_view field);

std::string_view trim(std::string_view s);
// Splits one CSV record. Fields may be double-quoted; "" inside quotes is a
// literal quote. No embedded newlines.
std::vector<std::string> split_csv(std::string_view line);
std::string quote_csv(std::string_view field);

// FNV-1a 64-bit, rendered as 16 hex digits.
std::string digest_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace respire::text
