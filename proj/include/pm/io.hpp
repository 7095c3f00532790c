#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace pm::io {

bool is_gzip(std::string_view bytes) noexcept;

/// Inflates a gzip member stream. Throws IoError on corrupt data.
std::string gunzip(std::string_view bytes);

/// Deflates `bytes` into a gzip stream with a zeroed header timestamp, so
/// identical input always yields identical output.
std::string gzip(std::string_view bytes);

/// Returns `bytes` decompressed if it carries the gzip magic, unchanged otherwise.
std::string maybe_gunzip(std::string bytes);

std::string read_file(const std::filesystem::path& path);

/// Reads a file and transparently decompresses it when gzip-compressed.
std::string read_text(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace pm::io
