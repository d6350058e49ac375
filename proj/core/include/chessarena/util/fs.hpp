#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace chessarena::util {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

void append_line(const std::filesystem::path& path, std::string_view line);

}  // namespace chessarena::util
