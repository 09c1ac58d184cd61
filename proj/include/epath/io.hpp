#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace epath::io {

/// Shortest round-trip decimal ("%.17g" class) used for every real written to disk.
std::string format_real(double value);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `contents` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view contents);

}  // namespace epath::io
