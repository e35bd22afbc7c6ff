#pragma once

#include "gcm/matlib.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace gcm::io {

/// 17 significant digits, enough for an exact read-back.
std::string format_double(double value);

/// Comma-separated, one matrix row per line, no header.
std::string format_matrix_csv(const Matrix& a);

/// Parses a rectangular comma-separated matrix. With `header` the first
/// line is skipped. Errors carry `source:line`.
Matrix parse_matrix_csv(std::string_view text, bool header, std::string_view source = "<csv>");

std::string read_file(const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path, bool header = false);

/// Writes through a sibling temporary file and renames it into place, so
/// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gcm::io
