#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace arena::util {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace arena::util
